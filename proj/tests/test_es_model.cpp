#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "rvpp/es_model.hpp"

using namespace rvpp;
using fixtures::backend;

namespace {

EsSchedule solve_es(const EsFleet& f, const MarketScenario& s,
                    const BudgetSet* b = nullptr,
                    const EsModelOptions& o = {}) {
  auto m = b ? build_robust_es(f, s, *b, o) : build_deterministic_es(f, s, o);
  auto sol = milp::solve(m, backend());
  REQUIRE(sol.optimal());
  return extract_es_schedule(m, sol, f, s);
}

EsFleet one_module(int n = 1) { return {reference::es_module(), n}; }

// Buy in the first hour, sell in the second: the energy moved is capped by
// the charge rate, the usable capacity and the discharge rate.
double two_period_arbitrage(const EsUnit& e, double buy, double sell,
                            double dt) {
  double stored = std::min({e.charge_p_max * e.charge_eff * dt,
                            e.e_max - e.e_min,
                            e.discharge_p_max * dt / e.discharge_eff});
  double bought = stored / e.charge_eff;
  double delivered = stored * e.discharge_eff;
  double profit = (sell - e.op_cost) * delivered - buy * bought;
  return std::max(0.0, profit);
}

}  // namespace

TEST_CASE("fleet scaling multiplies powers and energies only") {
  EsFleet f = one_module(7);
  EsUnit e = f.scaled();
  CHECK(e.charge_p_max == doctest::Approx(3.5));
  CHECK(e.e_max == doctest::Approx(7.0));
  CHECK(e.e_min == doctest::Approx(0.7));
  CHECK(e.charge_eff == 0.95);
  CHECK(e.op_cost == 30.0);
  f.module_count = 0;
  CHECK_FALSE(validate_es_fleet(f).empty());
  CHECK_THROWS_AS(build_deterministic_es(f, fixtures::flat_market(4)),
                  std::invalid_argument);
}

TEST_CASE("flat prices without reserve value leave the fleet idle") {
  auto sc = solve_es(one_module(), fixtures::flat_market(24, 60.0));
  CHECK(sc.objective == doctest::Approx(0.0));
  for (double x : sc.p_net) CHECK(x == doctest::Approx(0.0));
}

TEST_CASE("two-period arbitrage matches the closed form") {
  auto s = fixtures::flat_market(2);
  s.dam_price_median = {0.0, 100.0};
  const EsUnit e = reference::es_module();
  const double oracle = two_period_arbitrage(e, 0.0, 100.0, 1.0);
  CHECK(oracle == doctest::Approx(31.5875).epsilon(1e-12));
  auto sc = solve_es(one_module(), s);
  CHECK(std::fabs(sc.objective - oracle) <= 1e-6);
  CHECK(sc.p_ch[0] == doctest::Approx(0.5));
  CHECK(sc.p_dis[1] == doctest::Approx(0.45125));
  CHECK(sc.charging[0] == 1);
  CHECK(sc.charging[1] == 0);
}

TEST_CASE("reserve day: physics, cycle and envelopes hold in both margin forms") {
  auto s = fixtures::day_market();
  for (bool symmetric : {true, false}) {
    EsModelOptions o;
    o.symmetric_sigma_margins = symmetric;
    for (int n : {1, 3}) {
      EsFleet f = one_module(n);
      auto sc = solve_es(f, s, nullptr, o);
      CHECK(sc.objective > 0.0);
      auto v = es_violations(sc, f, o);
      CHECK_MESSAGE(v.empty(), (v.empty() ? "" : v.front()));
      CHECK(std::fabs(sc.soc.front() - sc.soc.back()) <= 1e-6);
      double span = f.scaled().e_max - f.scaled().e_min;
      double up = 0.0, dn = 0.0;
      for (int t = 0; t < 24; ++t) {
        CHECK(sc.p_ch[t] * sc.p_dis[t] == 0.0);
        up += sc.r_up[t] / f.module.discharge_eff;
        dn += sc.r_dn[t] * f.module.charge_eff;
      }
      CHECK(sc.sigma_up * span >= up - 1e-6);
      CHECK(sc.sigma_dn * span >= dn - 1e-6);
    }
  }
}

TEST_CASE("margin flag moves the floor to the up-reserve share") {
  auto s = fixtures::flat_market(3);
  EsModelOptions o;
  auto sym = build_deterministic_es(one_module(), s, o);
  o.symmetric_sigma_margins = false;
  auto asym = build_deterministic_es(one_module(), s, o);
  auto share = [](const milp::Model& m) {
    const auto& c = m.constraints()[*m.find_constraint("soc_floor(0)")];
    for (const auto& t : c.expr.terms())
      if (m.variable(t.var).name.rfind("sigma", 0) == 0)
        return m.variable(t.var).name;
    return std::string();
  };
  CHECK(share(sym) == "sigma_dn");
  CHECK(share(asym) == "sigma_up");
}

TEST_CASE("more modules never earn less") {
  auto s = fixtures::day_market();
  double prev = -1.0;
  for (int n = 1; n <= 4; ++n) {
    double v = solve_es(one_module(n), s).objective;
    CHECK(v >= prev - 1e-6);
    prev = v;
  }
}

TEST_CASE("zero price budgets reproduce the deterministic storage objective") {
  auto s = fixtures::day_market();
  BudgetSet zero;
  auto det = solve_es(one_module(5), s);
  auto rob = solve_es(one_module(5), s, &zero);
  CHECK(milp::close_rel(det.objective, rob.objective, 1e-6));
  REQUIRE(rob.robust.has_value());
  CHECK(rob.robust->penalty() == doctest::Approx(0.0));
}

TEST_CASE("sell price that can fall to zero in every hour stops discharging") {
  auto s = fixtures::day_market();
  s.dam_price_down_dev = s.dam_price_median;
  for (double& x : s.dam_price_up_dev) x = 500.0;
  BudgetSet b;
  b.gamma_dam = 24;
  auto sc = solve_es(one_module(4), s, &b);
  for (double x : sc.p_dis) CHECK(x == doctest::Approx(0.0));
  double reserve = 0.0;
  for (int t = 0; t < 24; ++t)
    reserve += s.srm_up_price_nominal[t] * sc.r_up[t] +
               s.srm_down_price_nominal[t] * sc.r_dn[t];
  CHECK(reserve > 0.0);
}

TEST_CASE("single-hour price budget prices the worst hour of the returned schedule") {
  const int T = 4;
  auto s = fixtures::flat_market(T);
  s.dam_price_median = {10.0, 120.0, 15.0, 110.0};
  s.dam_price_down_dev = {2.0, 30.0, 3.0, 10.0};
  s.dam_price_up_dev = {4.0, 25.0, 9.0, 12.0};
  BudgetSet b;
  b.gamma_dam = 1;
  EsFleet f = one_module(2);
  auto sc = solve_es(f, s, &b);
  double worst = 0.0;
  for (int t = 0; t < T; ++t)
    worst = std::max(worst, s.dam_price_down_dev[t] * sc.p_dis[t] +
                                s.dam_price_up_dev[t] * sc.p_ch[t]);
  REQUIRE(sc.robust.has_value());
  CHECK(std::fabs(sc.robust->dam.penalty() - worst) <= 1e-6);
  CHECK(worst > 0.0);
}

TEST_CASE("storage objective never rises with a price budget") {
  auto s = fixtures::day_market();
  EsFleet f = one_module(3);
  for (int stream = 0; stream < 3; ++stream) {
    double prev = 1e300;
    for (int g = 0; g <= 24; g += 4) {
      BudgetSet b;
      (stream == 0 ? b.gamma_dam : stream == 1 ? b.gamma_sr_up
                                               : b.gamma_sr_down) = g;
      double v = solve_es(f, s, &b).objective;
      CHECK(v <= prev + 1e-6);
      prev = v;
    }
  }
}

TEST_CASE("per-unit budgets are rejected by the storage model") {
  BudgetSet b;
  b.gamma_per_unit["wind"] = 2;
  CHECK_THROWS_AS(build_robust_es(one_module(), fixtures::flat_market(4), b),
                  std::invalid_argument);
  b.gamma_per_unit["wind"] = 0;
  CHECK_NOTHROW(build_robust_es(one_module(), fixtures::flat_market(4), b));
}

TEST_CASE("decoder catches a mode clash and a broken SOC") {
  auto s = fixtures::flat_market(2);
  s.dam_price_median = {0.0, 100.0};
  EsFleet f = one_module();
  auto m = build_deterministic_es(f, s);
  auto sol = milp::solve(m, backend());
  REQUIRE(sol.optimal());
  CHECK_NOTHROW(extract_es_schedule(m, sol, f, s));

  auto clash = sol;
  clash.values[m.require_variable("u_ch(1)").index] = 1.0;
  CHECK_THROWS_AS(extract_es_schedule(m, clash, f, s), DecodeError);

  auto soc = sol;
  soc.values[m.require_variable("soc(0)").index] += 0.01;
  CHECK_THROWS_AS(extract_es_schedule(m, soc, f, s), DecodeError);

  milp::Solution none;
  none.status = milp::SolveStatus::limit;
  CHECK_THROWS_AS(extract_es_schedule(m, none, f, s), DecodeError);
}
