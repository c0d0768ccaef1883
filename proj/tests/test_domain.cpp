#include <algorithm>

#include "doctest.h"
#include "rvpp/domain.hpp"
#include "rvpp/reference_data.hpp"

using namespace rvpp;

namespace {

MarketScenario flat_market(int T, double price = 50.0) {
  MarketScenario s;
  s.grid.period_count = T;
  s.dam_price_median.assign(T, price);
  s.dam_price_down_dev.assign(T, 5.0);
  s.dam_price_up_dev.assign(T, 5.0);
  s.srm_up_price_nominal.assign(T, 10.0);
  s.srm_down_price_nominal.assign(T, 10.0);
  s.srm_up_price_dev.assign(T, 2.0);
  s.srm_down_price_dev.assign(T, 2.0);
  s.season = Season::winter;
  return s;
}

NdrsUnit flat_wind(int T) {
  NdrsUnit u = reference::wind();
  u.forecast_upper.assign(T, 20.0);
  u.forecast_deviation.assign(T, 4.0);
  return u;
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) {
    return s.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("reference hydro data validates") {
  Portfolio p;
  p.drs.push_back(reference::hydro());
  auto h = p.drs.front();
  CHECK(h.p_max == 50.0);
  CHECK(h.p_min == 10.0);
  CHECK(h.startup_cost == 100.0);
  CHECK(h.shutdown_cost == 50.0);
  CHECK(h.op_cost == 12.5);
  CHECK(h.min_up == 1);
  CHECK(h.min_down == 0);
  CHECK(validate_portfolio(p, flat_market(24)).empty());
}

TEST_CASE("inverted DRS bounds give one ordering violation") {
  Portfolio p;
  auto u = reference::biomass();
  u.p_min = 20.0;
  u.p_max = 10.0;
  p.drs.push_back(u);
  auto v = validate_portfolio(p, flat_market(24));
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "p_min = 20 exceeds p_max = 10"));
}

TEST_CASE("deviation above the forecast names the period") {
  Portfolio p;
  auto u = flat_wind(24);
  u.forecast_deviation[5] = 25.0;
  p.ndrs.push_back(u);
  auto v = validate_portfolio(p, flat_market(24));
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "period 5"));
}

TEST_CASE("vector length mismatch is reported with the field") {
  Portfolio p;
  p.ndrs.push_back(flat_wind(24));
  auto s = flat_market(24);
  s.dam_price_median.pop_back();
  auto v = validate_portfolio(p, s);
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "dam_price_median has 23 entries"));
}

TEST_CASE("duplicate and unsafe unit names") {
  Portfolio p;
  p.ndrs.push_back(flat_wind(24));
  p.ndrs.push_back(flat_wind(24));
  auto v = validate_portfolio(p, flat_market(24));
  CHECK(mentions(v, "not unique"));

  p.ndrs.pop_back();
  p.ndrs[0].name = "wind farm";
  v = validate_portfolio(p, flat_market(24));
  CHECK(mentions(v, "must start with a letter"));
}

TEST_CASE("FD profile outside its bounds") {
  Portfolio p;
  FdUnit d;
  d.name = "fd";
  d.p_min = 1.0;
  d.p_max = 5.0;
  d.profiles = {std::vector<double>(24, 3.0)};
  d.profiles[0][7] = 6.0;
  d.demand_upward_deviation.assign(24, 0.1);
  p.fd.push_back(d);
  auto v = validate_portfolio(p, flat_market(24));
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "period 7"));
}

TEST_CASE("validation is side-effect free and idempotent") {
  Portfolio p;
  p.drs.push_back(reference::hydro());
  auto bad = flat_wind(24);
  bad.p_min = 30.0;
  p.ndrs.push_back(bad);
  auto s = flat_market(24);
  const Portfolio p0 = p;
  const MarketScenario s0 = s;
  auto a = validate_portfolio(p, s);
  auto b = validate_portfolio(p, s);
  CHECK(a == b);
  CHECK(!a.empty());
  CHECK(p == p0);
  CHECK(s == s0);
}

TEST_CASE("ES module data") {
  auto m = reference::es_module();
  CHECK(m.charge_p_max == 0.5);
  CHECK(m.discharge_p_max == 0.5);
  CHECK(m.e_max == 1.0);
  CHECK(m.e_min == 0.1);
  CHECK(m.op_cost == 30.0);
  CHECK(m.charge_eff == 0.95);
  CHECK(m.discharge_eff == 0.95);
  CHECK(validate_es_unit(m).empty());
  m.e_min = m.e_max;
  CHECK(validate_es_unit(m).size() == 1);
}

namespace {
Portfolio five_class_portfolio() {
  Portfolio p;
  p.drs = {reference::hydro(), reference::biomass()};
  p.ndrs = {flat_wind(24), reference::solar_pv()};
  p.ndrs[1].forecast_upper.assign(24, 0.0);
  p.ndrs[1].forecast_deviation.assign(24, 0.0);
  p.csp = {reference::csp()};
  FdUnit d;
  d.name = "fd";
  p.fd = {d};
  return p;
}
}  // namespace

TEST_CASE("strategy budgets map the table rows onto unit classes") {
  auto p = five_class_portfolio();
  struct Row {
    Strategy s;
    int price, wf, pv, sf, fd;
  };
  for (Row r : {Row{Strategy::optimistic, 3, 3, 2, 2, 2},
                Row{Strategy::balanced, 6, 6, 4, 4, 4},
                Row{Strategy::pessimistic, 9, 9, 6, 6, 6}}) {
    CAPTURE(to_string(r.s));
    auto b = strategy_budgets(r.s, p);
    CHECK(b.gamma_dam == r.price);
    CHECK(b.gamma_sr_up == r.price);
    CHECK(b.gamma_sr_down == r.price);
    CHECK(b.unit("wind") == r.wf);
    CHECK(b.unit("pv") == r.pv);
    CHECK(b.unit("csp") == r.sf);
    CHECK(b.unit("fd") == r.fd);
    CHECK(b.unit("hydro") == 0);
    for (int T = 9; T <= 30; ++T) CHECK(validate_budgets(b, T).empty());
  }
  CHECK_THROWS_AS(strategy_budgets("reckless", p), std::invalid_argument);
}

TEST_CASE("every unit of a class gets the class budget") {
  auto p = five_class_portfolio();
  auto w2 = p.ndrs[0];
  w2.name = "wind2";
  p.ndrs.push_back(w2);
  auto b = strategy_budgets(Strategy::balanced, p);
  CHECK(b.unit("wind2") == 6);
}

TEST_CASE("budgets outside [0, T] are rejected") {
  BudgetSet b;
  b.gamma_dam = 25;
  b.gamma_per_unit["wind"] = -1;
  CHECK(validate_budgets(b, 24).size() == 2);
}

namespace {
std::pair<Portfolio, MarketScenario> regime_fixture() {
  Portfolio p = five_class_portfolio();
  MarketScenario s = flat_market(24);
  s.seasonal_energy_limits["hydro"] = reference::hydro_energy_limits();
  s.regime_deviations["wind"] = {std::vector<double>(24, 2.0),
                                 std::vector<double>(24, 6.0)};
  return {p, s};
}
}  // namespace

TEST_CASE("apply_regime sets seasonal hydro limits") {
  auto [p, s] = regime_fixture();
  s.season = Season::winter;
  CHECK(apply_regime(p, s, Regime::favorable).first.drs[0].daily_energy_limit ==
        1164.0);
  s.season = Season::summer;
  auto [p2, s2] = apply_regime(p, s, Regime::unfavorable);
  CHECK(p2.drs[0].daily_energy_limit == 420.0);
  CHECK(s2.regime == Regime::unfavorable);

  const double fav[] = {1164, 972, 528, 708};
  const double unf[] = {804, 624, 420, 612};
  for (int i = 0; i < 4; ++i) {
    s.season = kAllSeasons[i];
    CHECK(apply_regime(p, s, Regime::favorable).first.drs[0].daily_energy_limit ==
          fav[i]);
    CHECK(apply_regime(p, s, Regime::unfavorable)
              .first.drs[0]
              .daily_energy_limit == unf[i]);
  }
}

TEST_CASE("apply_regime changes only limits and deviations") {
  auto [p, s] = regime_fixture();
  auto [q, t] = apply_regime(p, s, Regime::unfavorable);
  CHECK(q.drs[1] == p.drs[1]);  // biomass untouched
  CHECK(q.ndrs[0].forecast_deviation == std::vector<double>(24, 6.0));

  // Restore the fields apply_regime may touch; everything else must match.
  q.drs[0].daily_energy_limit = p.drs[0].daily_energy_limit;
  q.ndrs[0].forecast_deviation = p.ndrs[0].forecast_deviation;
  t.regime = s.regime;
  CHECK(q == p);
  CHECK(t == s);
}

TEST_CASE("apply_regime needs a season") {
  auto [p, s] = regime_fixture();
  s.season.reset();
  CHECK_THROWS_AS(apply_regime(p, s, Regime::favorable),
                  std::invalid_argument);
  auto [p2, s2] = regime_fixture();
  s2.seasonal_energy_limits["hydro"].erase(Season::winter);
  CHECK_THROWS_AS(apply_regime(p2, s2, Regime::favorable),
                  std::invalid_argument);
}

TEST_CASE("enum names round-trip") {
  for (auto s : kAllSeasons) CHECK(parse_season(to_string(s)) == s);
  for (auto r : kAllRegimes) CHECK(parse_regime(to_string(r)) == r);
  for (auto s : kStrategyLadder) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_regime("mild"), std::invalid_argument);
}

TEST_CASE("portfolio transforms") {
  auto p = five_class_portfolio();
  p.fd[0].profiles = {std::vector<double>(24, 4.0)};
  p.fd[0].p_min = 2.0;
  p.fd[0].p_max = 6.0;
  p.fd[0].demand_upward_deviation.assign(24, 1.0);

  auto half = scale_flexible_demand(p, 0.5);
  CHECK(half.fd[0].profiles[0][3] == 2.0);
  CHECK(half.fd[0].p_max == 3.0);
  CHECK(half.fd[0].demand_upward_deviation[0] == 0.5);
  CHECK(scale_flexible_demand(p, 0.0).fd.empty());

  auto no_pv = without_technology(p, Technology::solar_pv);
  CHECK(no_pv.ndrs.size() == 1);
  CHECK(without_technology(p, Technology::csp).csp.empty());

  auto single = singleton_portfolio(p, "biomass");
  CHECK(single.size() == 1);
  CHECK(single.drs[0].name == "biomass");
  CHECK_THROWS(singleton_portfolio(p, "nope"));
}
