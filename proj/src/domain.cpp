#include "rvpp/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace rvpp {

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view text, const char* what,
             const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, value] : table)
    if (name == text) return value;
  throw std::invalid_argument(std::string("unknown ") + what + " '" +
                              std::string(text) + "'");
}

constexpr std::pair<std::string_view, Season> kSeasons[] = {
    {"winter", Season::winter},
    {"spring", Season::spring},
    {"summer", Season::summer},
    {"autumn", Season::autumn}};
constexpr std::pair<std::string_view, Regime> kRegimes[] = {
    {"favorable", Regime::favorable}, {"unfavorable", Regime::unfavorable}};
constexpr std::pair<std::string_view, Strategy> kStrategies[] = {
    {"optimistic", Strategy::optimistic},
    {"balanced", Strategy::balanced},
    {"pessimistic", Strategy::pessimistic}};
constexpr std::pair<std::string_view, Technology> kTechnologies[] = {
    {"hydro", Technology::hydro},
    {"biomass", Technology::biomass},
    {"wind", Technology::wind},
    {"solar_pv", Technology::solar_pv},
    {"csp", Technology::csp},
    {"flexible_demand", Technology::flexible_demand},
    {"other", Technology::other}};

template <class E, std::size_t N>
std::string_view enum_name(E value,
                           const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

// Unit names end up inside LP identifiers, so keep them to a safe alphabet.
bool valid_unit_name(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

class Collector {
 public:
  explicit Collector(int periods) : periods_(periods) {}

  void add(std::string msg) { out_.push_back(std::move(msg)); }

  void length(const std::string& where, const char* field,
              const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != periods_)
      add(fmt("%s: %s has %zu entries, grid has %d periods", where.c_str(),
              field, v.size(), periods_));
    else if (!finite_all(v))
      add(fmt("%s: %s contains a non-finite value", where.c_str(), field));
  }

  void non_negative(const std::string& where, const char* field,
                    const std::vector<double>& v) {
    for (std::size_t t = 0; t < v.size(); ++t)
      if (v[t] < 0.0) {
        add(fmt("%s: %s[%zu] = %g is negative", where.c_str(), field, t,
                v[t]));
        return;
      }
  }

  void non_negative(const std::string& where, const char* field, double x) {
    if (!(x >= 0.0) || !std::isfinite(x))
      add(fmt("%s: %s = %g must be finite and >= 0", where.c_str(), field,
              x));
  }

  void fraction(const std::string& where, const char* field, double x) {
    if (!(x > 0.0 && x <= 1.0))
      add(fmt("%s: %s = %g must lie in (0, 1]", where.c_str(), field, x));
  }

  void ordered(const std::string& where, const char* lo_name, double lo,
               const char* hi_name, double hi) {
    if (lo > hi)
      add(fmt("%s: %s = %g exceeds %s = %g", where.c_str(), lo_name, lo,
              hi_name, hi));
  }

  void deviation_within(const std::string& where, const char* dev_name,
                        const std::vector<double>& dev,
                        const std::vector<double>& upper) {
    std::size_t n = std::min(dev.size(), upper.size());
    for (std::size_t t = 0; t < n; ++t)
      if (dev[t] < 0.0 || dev[t] > upper[t]) {
        add(fmt("%s: %s at period %zu is %g, outside [0, %g]", where.c_str(),
                dev_name, t, dev[t], upper[t]));
      }
  }

  std::vector<std::string> take() { return std::move(out_); }

 private:
  int periods_;
  std::vector<std::string> out_;
};

void check_initial(Collector& c, const std::string& where,
                   const InitialCommitment& init) {
  if (init.periods_remaining < 0)
    c.add(where + ": initial periods_remaining must be >= 0");
}

void check_ts(Collector& c, const std::string& where,
              const ThermalStoreParams& ts) {
  c.non_negative(where, "ts.e_min", ts.e_min);
  c.ordered(where, "ts.e_min", ts.e_min, "ts.e_max", ts.e_max);
  c.non_negative(where, "ts.charge_p_max", ts.charge_p_max);
  c.non_negative(where, "ts.discharge_p_max", ts.discharge_p_max);
  c.fraction(where, "ts.charge_eff", ts.charge_eff);
  c.fraction(where, "ts.discharge_eff", ts.discharge_eff);
}

}  // namespace

std::string_view to_string(Season s) { return enum_name(s, kSeasons); }
std::string_view to_string(Regime r) { return enum_name(r, kRegimes); }
std::string_view to_string(Strategy s) { return enum_name(s, kStrategies); }
std::string_view to_string(Technology t) {
  return enum_name(t, kTechnologies);
}

Season parse_season(std::string_view text) {
  return parse_enum(text, "season", kSeasons);
}
Regime parse_regime(std::string_view text) {
  return parse_enum(text, "regime", kRegimes);
}
Strategy parse_strategy(std::string_view text) {
  return parse_enum(text, "strategy", kStrategies);
}
Technology parse_technology(std::string_view text) {
  return parse_enum(text, "technology", kTechnologies);
}

int BudgetSet::unit(std::string_view name) const {
  auto it = gamma_per_unit.find(std::string(name));
  return it == gamma_per_unit.end() ? 0 : it->second;
}

bool BudgetSet::all_zero() const {
  if (gamma_dam || gamma_sr_up || gamma_sr_down) return false;
  for (const auto& [name, g] : gamma_per_unit)
    if (g) return false;
  return true;
}

std::vector<std::string> Portfolio::unit_names() const {
  std::vector<std::string> names;
  for (const auto& u : drs) names.push_back(u.name);
  for (const auto& u : ndrs) names.push_back(u.name);
  for (const auto& u : csp) names.push_back(u.name);
  for (const auto& u : fd) names.push_back(u.name);
  return names;
}

bool Portfolio::contains(std::string_view name) const {
  auto names = unit_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> validate_portfolio(const Portfolio& p,
                                            const MarketScenario& s) {
  const int T = s.grid.period_count;
  Collector c(T);

  if (T < 1) c.add(fmt("grid: period_count = %d must be >= 1", T));
  if (!(s.grid.delta_t > 0.0) || !std::isfinite(s.grid.delta_t))
    c.add(fmt("grid: delta_t = %g must be > 0", s.grid.delta_t));

  const std::string market = "market";
  c.length(market, "dam_price_median", s.dam_price_median);
  c.length(market, "dam_price_down_dev", s.dam_price_down_dev);
  c.length(market, "dam_price_up_dev", s.dam_price_up_dev);
  c.length(market, "srm_up_price_nominal", s.srm_up_price_nominal);
  c.length(market, "srm_down_price_nominal", s.srm_down_price_nominal);
  c.length(market, "srm_up_price_dev", s.srm_up_price_dev);
  c.length(market, "srm_down_price_dev", s.srm_down_price_dev);
  c.non_negative(market, "dam_price_down_dev", s.dam_price_down_dev);
  c.non_negative(market, "dam_price_up_dev", s.dam_price_up_dev);
  c.non_negative(market, "srm_up_price_dev", s.srm_up_price_dev);
  c.non_negative(market, "srm_down_price_dev", s.srm_down_price_dev);
  // The robust DAM block prices buy-side loss relative to the sell-side
  // deviation, so a zero down-deviation cannot carry a positive up-deviation.
  {
    std::size_t n =
        std::min(s.dam_price_down_dev.size(), s.dam_price_up_dev.size());
    for (std::size_t t = 0; t < n; ++t)
      if (s.dam_price_down_dev[t] == 0.0 && s.dam_price_up_dev[t] > 0.0) {
        c.add(fmt("market: dam_price_down_dev[%zu] is 0 while "
                  "dam_price_up_dev[%zu] > 0",
                  t, t));
        break;
      }
  }

  std::set<std::string> seen;
  for (const auto& name : p.unit_names()) {
    if (!valid_unit_name(name))
      c.add("unit name '" + name +
            "' must start with a letter and use only letters, digits, '_' "
            "or '.'");
    if (!seen.insert(name).second)
      c.add("unit name '" + name + "' is not unique");
  }

  for (const auto& u : p.drs) {
    const std::string w = "drs " + u.name;
    c.non_negative(w, "p_min", u.p_min);
    c.ordered(w, "p_min", u.p_min, "p_max", u.p_max);
    c.non_negative(w, "op_cost", u.op_cost);
    c.non_negative(w, "startup_cost", u.startup_cost);
    c.non_negative(w, "shutdown_cost", u.shutdown_cost);
    if (u.min_up < 0) c.add(w + ": min_up must be >= 0");
    if (u.min_down < 0) c.add(w + ": min_down must be >= 0");
    c.non_negative(w, "daily_energy_limit", u.daily_energy_limit);
    check_initial(c, w, u.initial);
  }

  for (const auto& u : p.ndrs) {
    const std::string w = "ndrs " + u.name;
    c.length(w, "forecast_upper", u.forecast_upper);
    c.length(w, "forecast_deviation", u.forecast_deviation);
    c.non_negative(w, "forecast_upper", u.forecast_upper);
    c.deviation_within(w, "forecast_deviation", u.forecast_deviation,
                       u.forecast_upper);
    c.non_negative(w, "p_min", u.p_min);
    c.non_negative(w, "op_cost", u.op_cost);
    std::size_t n = std::min(u.forecast_upper.size(),
                             u.forecast_deviation.size());
    for (std::size_t t = 0; t < n; ++t) {
      if (u.forecast_deviation[t] > u.forecast_upper[t]) continue;
      double floor = u.forecast_upper[t] - u.forecast_deviation[t];
      if (u.p_min > floor) {
        c.add(fmt("%s: p_min = %g exceeds the degraded forecast %g at "
                  "period %zu",
                  w.c_str(), u.p_min, floor, t));
        break;
      }
    }
  }

  for (const auto& u : p.csp) {
    const std::string w = "csp " + u.name;
    c.length(w, "sf_thermal_upper", u.sf_thermal_upper);
    c.length(w, "sf_thermal_deviation", u.sf_thermal_deviation);
    c.non_negative(w, "sf_thermal_upper", u.sf_thermal_upper);
    c.deviation_within(w, "sf_thermal_deviation", u.sf_thermal_deviation,
                       u.sf_thermal_upper);
    c.non_negative(w, "turbine_p_min", u.turbine_p_min);
    c.ordered(w, "turbine_p_min", u.turbine_p_min, "turbine_p_max",
              u.turbine_p_max);
    c.fraction(w, "efficiency", u.efficiency);
    c.non_negative(w, "startup_loss_mult", u.startup_loss_mult);
    if (u.min_up < 0) c.add(w + ": min_up must be >= 0");
    if (u.min_down < 0) c.add(w + ": min_down must be >= 0");
    c.non_negative(w, "op_cost", u.op_cost);
    check_ts(c, w, u.ts);
    check_initial(c, w, u.initial);
  }

  for (const auto& u : p.fd) {
    const std::string w = "fd " + u.name;
    if (u.profiles.empty()) c.add(w + ": profiles must not be empty");
    c.non_negative(w, "p_min", u.p_min);
    c.ordered(w, "p_min", u.p_min, "p_max", u.p_max);
    for (std::size_t m = 0; m < u.profiles.size(); ++m) {
      const auto& prof = u.profiles[m];
      std::string field = fmt("profiles[%zu]", m);
      c.length(w, field.c_str(), prof);
      for (std::size_t t = 0; t < prof.size(); ++t)
        if (prof[t] < u.p_min || prof[t] > u.p_max) {
          c.add(fmt("%s: profile %zu value %g at period %zu is outside "
                    "[%g, %g]",
                    w.c_str(), m, prof[t], t, u.p_min, u.p_max));
          break;
        }
    }
    c.length(w, "demand_upward_deviation", u.demand_upward_deviation);
    c.non_negative(w, "demand_upward_deviation", u.demand_upward_deviation);
    c.non_negative(w, "flexibility_margin", u.flexibility_margin);
  }

  for (const auto& [name, table] : s.seasonal_energy_limits)
    for (const auto& [season, pair] : table) {
      c.non_negative("energy limits " + name, "favorable", pair.favorable);
      c.non_negative("energy limits " + name, "unfavorable",
                     pair.unfavorable);
    }
  for (const auto& [name, pair] : s.regime_deviations) {
    const std::string w = "regime deviations " + name;
    c.length(w, "favorable", pair.favorable);
    c.length(w, "unfavorable", pair.unfavorable);
    c.non_negative(w, "favorable", pair.favorable);
    c.non_negative(w, "unfavorable", pair.unfavorable);
  }

  return c.take();
}

std::vector<std::string> validate_budgets(const BudgetSet& b,
                                          int period_count) {
  std::vector<std::string> out;
  auto check = [&](const std::string& what, int g) {
    if (g < 0 || g > period_count)
      out.push_back(fmt("budget %s = %d outside [0, %d]", what.c_str(), g,
                        period_count));
  };
  check("gamma_dam", b.gamma_dam);
  check("gamma_sr_up", b.gamma_sr_up);
  check("gamma_sr_down", b.gamma_sr_down);
  for (const auto& [name, g] : b.gamma_per_unit) check(name, g);
  return out;
}

std::vector<std::string> validate_es_unit(const EsUnit& u) {
  Collector c(0);
  const std::string w = "es module";
  c.non_negative(w, "charge_p_min", u.charge_p_min);
  c.ordered(w, "charge_p_min", u.charge_p_min, "charge_p_max",
            u.charge_p_max);
  c.non_negative(w, "discharge_p_min", u.discharge_p_min);
  c.ordered(w, "discharge_p_min", u.discharge_p_min, "discharge_p_max",
            u.discharge_p_max);
  c.non_negative(w, "e_min", u.e_min);
  if (!(u.e_min < u.e_max))
    c.add(fmt("%s: e_min = %g must be below e_max = %g", w.c_str(), u.e_min,
              u.e_max));
  c.fraction(w, "charge_eff", u.charge_eff);
  c.fraction(w, "discharge_eff", u.discharge_eff);
  c.non_negative(w, "op_cost", u.op_cost);
  return c.take();
}

BudgetSet strategy_budgets(Strategy strategy, const Portfolio& p) {
  // Price/wind column and the reduced column for PV, solar field and demand.
  int full = 0, reduced = 0;
  switch (strategy) {
    case Strategy::optimistic: full = 3, reduced = 2; break;
    case Strategy::balanced: full = 6, reduced = 4; break;
    case Strategy::pessimistic: full = 9, reduced = 6; break;
  }
  BudgetSet b;
  b.gamma_dam = b.gamma_sr_up = b.gamma_sr_down = full;
  for (const auto& u : p.ndrs)
    b.gamma_per_unit[u.name] =
        u.technology == Technology::solar_pv ? reduced : full;
  for (const auto& u : p.csp) b.gamma_per_unit[u.name] = reduced;
  for (const auto& u : p.fd) b.gamma_per_unit[u.name] = reduced;
  return b;
}

BudgetSet strategy_budgets(std::string_view strategy, const Portfolio& p) {
  return strategy_budgets(parse_strategy(strategy), p);
}

std::pair<Portfolio, MarketScenario> apply_regime(Portfolio p,
                                                  MarketScenario s,
                                                  Regime regime) {
  if (!s.season)
    throw std::invalid_argument("apply_regime: scenario has no season tag");
  const Season season = *s.season;

  for (auto& u : p.drs) {
    auto it = s.seasonal_energy_limits.find(u.name);
    if (it == s.seasonal_energy_limits.end()) continue;
    auto st = it->second.find(season);
    if (st == it->second.end())
      throw std::invalid_argument("apply_regime: energy limit table for '" +
                                  u.name + "' has no season '" +
                                  std::string(to_string(season)) + "'");
    u.daily_energy_limit = st->second[regime];
  }

  auto deviation = [&](const std::string& name) -> const std::vector<double>* {
    auto it = s.regime_deviations.find(name);
    return it == s.regime_deviations.end() ? nullptr : &it->second[regime];
  };
  for (auto& u : p.ndrs)
    if (auto* d = deviation(u.name)) u.forecast_deviation = *d;
  for (auto& u : p.csp)
    if (auto* d = deviation(u.name)) u.sf_thermal_deviation = *d;
  for (auto& u : p.fd)
    if (auto* d = deviation(u.name)) u.demand_upward_deviation = *d;

  s.regime = regime;
  return {std::move(p), std::move(s)};
}

Portfolio singleton_portfolio(const Portfolio& p, std::string_view name) {
  Portfolio out;
  for (const auto& u : p.drs)
    if (u.name == name) out.drs.push_back(u);
  for (const auto& u : p.ndrs)
    if (u.name == name) out.ndrs.push_back(u);
  for (const auto& u : p.csp)
    if (u.name == name) out.csp.push_back(u);
  for (const auto& u : p.fd)
    if (u.name == name) out.fd.push_back(u);
  if (out.empty())
    throw std::invalid_argument("no unit named '" + std::string(name) + "'");
  return out;
}

Portfolio without_technology(const Portfolio& p, Technology tech) {
  Portfolio out = p;
  std::erase_if(out.drs, [&](const DrsUnit& u) { return u.technology == tech; });
  std::erase_if(out.ndrs,
                [&](const NdrsUnit& u) { return u.technology == tech; });
  if (tech == Technology::csp) out.csp.clear();
  if (tech == Technology::flexible_demand) out.fd.clear();
  return out;
}

Portfolio scale_flexible_demand(const Portfolio& p, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("flexible demand scale must be >= 0");
  Portfolio out = p;
  if (factor == 0.0) {
    out.fd.clear();
    return out;
  }
  for (auto& u : out.fd) {
    for (auto& prof : u.profiles)
      for (double& x : prof) x *= factor;
    u.p_min *= factor;
    u.p_max *= factor;
    for (double& x : u.demand_upward_deviation) x *= factor;
  }
  return out;
}

}  // namespace rvpp
