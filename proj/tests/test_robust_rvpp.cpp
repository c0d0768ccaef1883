#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "rvpp/rvpp_model.hpp"

using namespace rvpp;
using fixtures::backend;

namespace {

RvppDecoded solve_robust(const Portfolio& p, const MarketScenario& s,
                         const BudgetSet& b, const RvppModelOptions& o = {}) {
  auto m = build_robust_rvpp(p, s, b, milp::kDefaultBigM, o);
  auto sol = milp::solve(m, backend());
  REQUIRE(sol.optimal());
  return extract_rvpp_schedule(m, sol, p, s, o);
}

double solve_det_objective(const Portfolio& p, const MarketScenario& s) {
  auto m = build_deterministic_rvpp(p, s);
  auto sol = milp::solve(m, backend());
  REQUIRE(sol.optimal());
  return sol.objective_value;
}

RvppModelOptions selected() {
  RvppModelOptions o;
  o.generation_robustness = GenerationRobustness::selected_periods;
  return o;
}

}  // namespace

TEST_CASE("zero budgets reproduce the deterministic objective") {
  auto p = fixtures::day_portfolio();
  auto s = fixtures::day_market();
  const double det = solve_det_objective(p, s);
  BudgetSet zero;
  for (auto mode : {GenerationRobustness::per_period,
                    GenerationRobustness::selected_periods}) {
    RvppModelOptions o;
    o.generation_robustness = mode;
    auto r = solve_robust(p, s, zero, o);
    CHECK(milp::close_rel(r.schedule.objective, det, 1e-6));
    REQUIRE(r.robust.has_value());
    CHECK(r.robust->price_penalty() == doctest::Approx(0.0));
  }
}

TEST_CASE("full loss in every hour erases an NDRS") {
  const int T = 6;
  Portfolio p;
  p.ndrs.push_back(fixtures::flat_ndrs(T, 12.0, 12.0, 5.0));
  auto s = fixtures::flat_market(T, 50.0);
  s.srm_up_price_nominal.assign(T, 10.0);
  BudgetSet b;
  b.gamma_per_unit["wind"] = T;
  for (auto o : {RvppModelOptions{}, selected()}) {
    auto r = solve_robust(p, s, b, o);
    const auto* u = r.schedule.unit("wind");
    for (int t = 0; t < T; ++t) {
      CHECK(u->p[t] + u->r_up[t] <= 1e-6);
      CHECK(r.schedule.p_da[t] == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(r.schedule.objective == doctest::Approx(0.0));
  }
}

TEST_CASE("T=4 single NDRS: row-wise and selected-period forms bracket the subset re-solves") {
  const int T = 4;
  Portfolio p;
  NdrsUnit w = fixtures::flat_ndrs(T, 10.0, 0.0, 10.0);
  w.forecast_deviation = {4.0, 1.0, 3.0, 2.0};
  p.ndrs.push_back(w);
  auto s = fixtures::flat_market(T, 50.0);
  s.dam_price_median = {40.0, 60.0, 50.0, 45.0};
  BudgetSet b;
  b.gamma_per_unit["wind"] = 2;

  double worst = 1e300, best = -1e300;
  for (int i = 0; i < T; ++i)
    for (int j = i + 1; j < T; ++j) {
      Portfolio q = p;
      q.ndrs[0].forecast_upper[i] -= w.forecast_deviation[i];
      q.ndrs[0].forecast_upper[j] -= w.forecast_deviation[j];
      double v = solve_det_objective(q, s);
      worst = std::min(worst, v);
      best = std::max(best, v);
    }
  Portfolio all = p;
  for (int t = 0; t < T; ++t)
    all.ndrs[0].forecast_upper[t] -= w.forecast_deviation[t];
  const double all_degraded = solve_det_objective(all, s);

  auto row = solve_robust(p, s, b);
  auto sel = solve_robust(p, s, b, selected());
  CHECK(row.schedule.objective == doctest::Approx(all_degraded));
  CHECK(row.schedule.objective <= worst + 1e-6);
  CHECK(sel.schedule.objective == doctest::Approx(best));
  CHECK(worst < best);

  REQUIRE(sel.robust.has_value());
  const auto& ur = sel.robust->units.front();
  CHECK(ur.q.size() == 4);
  CHECK(std::accumulate(ur.q.begin(), ur.q.end(), 0) == 2);
  for (int t = 0; t < T; ++t) {
    CHECK(ur.x[t] >= -1e-9);
    CHECK(ur.xi[t] >= -1e-9);
    if (ur.q[t]) CHECK(ur.x[t] >= w.forecast_deviation[t] - 1e-6);
    else CHECK(ur.x[t] <= 1e-6);
  }
  // The hours whose loss costs least: margin times deviation.
  CHECK(ur.q == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("price duals: penalty equals the top-budget loss of the schedule") {
  const int T = 6;
  Portfolio p;
  p.ndrs.push_back(fixtures::flat_ndrs(T, 10.0, 0.0, 0.0));
  auto s = fixtures::flat_market(T, 50.0);
  s.dam_price_down_dev = {5.0, 9.0, 1.0, 7.0, 3.0, 2.0};
  s.dam_price_up_dev = s.dam_price_down_dev;
  BudgetSet b;
  b.gamma_dam = 2;
  auto r = solve_robust(p, s, b);
  // Selling 10 MW in every hour; the adversary cuts the two largest drops.
  CHECK(r.robust->dam.penalty() == doctest::Approx(10.0 * (9.0 + 7.0)));
  CHECK(r.schedule.objective ==
        doctest::Approx(T * 10.0 * 50.0 - 10.0 * 16.0));
  CHECK(r.robust->dam.mu >= -1e-9);
  for (double x : r.robust->x_da) CHECK(x >= -1e-9);
}

TEST_CASE("budget ladder never raises the robust objective") {
  auto p = fixtures::day_portfolio();
  auto s = fixtures::day_market();
  for (auto mode : {GenerationRobustness::per_period,
                    GenerationRobustness::selected_periods}) {
    RvppModelOptions o;
    o.generation_robustness = mode;
    double prev = 1e300;
    for (Strategy k : kStrategyLadder) {
      auto r = solve_robust(p, s, strategy_budgets(k, p), o);
      CHECK(r.schedule.objective <= prev + 1e-6);
      CHECK(rvpp_balance_residual(r.schedule, p) <= milp::kFeasibilityTol);
      prev = r.schedule.objective;
    }
  }
}

TEST_CASE("raising one budget at a time is monotone") {
  const int T = 6;
  Portfolio p;
  NdrsUnit w = fixtures::flat_ndrs(T, 10.0, 0.0, 5.0);
  w.forecast_deviation = {2.0, 5.0, 1.0, 3.0, 4.0, 2.5};
  p.ndrs.push_back(w);
  auto s = fixtures::flat_market(T, 50.0);
  s.dam_price_down_dev = {5.0, 9.0, 1.0, 7.0, 3.0, 2.0};
  s.dam_price_up_dev = s.dam_price_down_dev;
  s.srm_up_price_nominal.assign(T, 4.0);
  s.srm_up_price_dev.assign(T, 1.0);
  BudgetSet b;
  double prev = solve_robust(p, s, b).schedule.objective;
  for (int step = 0; step < 2 * T; ++step) {
    if (step % 2 == 0) ++b.gamma_dam;
    else ++b.gamma_sr_up;
    double v = solve_robust(p, s, b).schedule.objective;
    CHECK(v <= prev + 1e-6);
    prev = v;
  }
}

TEST_CASE("flexible demand deviation raises the consumption floor") {
  const int T = 3;
  FdUnit d;
  d.name = "load";
  d.profiles = {{2.0, 2.0, 2.0}};
  d.p_min = 1.0;
  d.p_max = 4.0;
  d.demand_upward_deviation = {1.0, 0.5, 0.25};
  Portfolio p;
  p.fd.push_back(d);
  auto s = fixtures::flat_market(T, 10.0);
  BudgetSet b;
  b.gamma_per_unit["load"] = 1;
  auto r = solve_robust(p, s, b);
  const auto* u = r.schedule.unit("load");
  CHECK(u->p == std::vector<double>{3.0, 2.5, 2.25});
  auto sel = solve_robust(p, s, b, selected());
  CHECK(sel.schedule.unit("load")->p[2] == doctest::Approx(2.25));
  CHECK(sel.schedule.objective == doctest::Approx(-10.0 * 6.25));
}

TEST_CASE("buy-side asymmetry follows the price up-deviation") {
  const int T = 2;
  FdUnit d;
  d.name = "load";
  d.profiles = {{2.0, 2.0}};
  d.p_min = 2.0;
  d.p_max = 2.0;
  d.demand_upward_deviation.assign(T, 0.0);
  Portfolio p;
  p.fd.push_back(d);
  auto s = fixtures::flat_market(T, 40.0);
  s.dam_price_down_dev = {4.0, 4.0};
  s.dam_price_up_dev = {8.0, 2.0};
  BudgetSet b;
  b.gamma_dam = 1;
  auto r = solve_robust(p, s, b);
  // Buying 2 MW: the worst single-hour price spike costs 2 * 8.
  CHECK(r.robust->dam.penalty() == doctest::Approx(16.0));
  CHECK(r.schedule.objective == doctest::Approx(-160.0 - 16.0));
}
