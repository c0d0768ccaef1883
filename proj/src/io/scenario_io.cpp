#include "rvpp/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "rvpp/reference_data.hpp"

namespace rvpp {

std::vector<Season> ScenarioSet::seasons() const {
  std::vector<Season> out;
  for (const auto& [s, _] : markets) out.push_back(s);
  return out;
}

std::pair<Portfolio, MarketScenario> ScenarioSet::at(Season season,
                                                     Regime regime) const {
  auto p = portfolios.find(season);
  auto m = markets.find(season);
  if (p == portfolios.end() || m == markets.end())
    throw std::invalid_argument("scenario '" + name + "' has no season '" +
                                std::string(to_string(season)) + "'");
  return apply_regime(p->second, m->second, regime);
}

namespace {

constexpr std::string_view kReference = "reference";

class Parser {
 public:
  explicit Parser(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    std::string where = origin_;
    if (at.IsDefined() && at.Mark().line >= 0)
      where += ":" + std::to_string(at.Mark().line + 1);
    throw ScenarioError(where + ": " + msg);
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  // Rejects keys outside `allowed`, which catches misspelled fields.
  void check_keys(const YAML::Node& n, const std::string& what,
                  std::initializer_list<std::string_view> allowed) const {
    expect_map(n, what);
    for (const auto& kv : n) {
      auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(kv.first, "unknown field '" + key + "' in " + what);
    }
  }

  YAML::Node require(const YAML::Node& n, const std::string& key,
                     const std::string& what) const {
    YAML::Node v = n[key];
    if (!v) fail(n, what + " is missing required field '" + key + "'");
    return v;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, "'" + field + "' must be a number");
    double v;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + field + "' is not a number: '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail(n, "'" + field + "' must be finite");
    return v;
  }

  int integer(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, "'" + field + "' must be an integer");
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + field + "' is not an integer: '" + n.Scalar() + "'");
    }
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + field + "' must be true or false");
    }
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, "'" + field + "' must be a string");
    return n.Scalar();
  }

  void opt(const YAML::Node& n, const std::string& key, double& out) const {
    if (n[key]) out = number(n[key], key);
  }
  void opt(const YAML::Node& n, const std::string& key, int& out) const {
    if (n[key]) out = integer(n[key], key);
  }

  std::vector<double> series(const YAML::Node& n, const std::string& field,
                             int length) const {
    if (!n.IsSequence()) fail(n, "'" + field + "' must be a list of numbers");
    if (static_cast<int>(n.size()) != length)
      fail(n, "'" + field + "' has " + std::to_string(n.size()) +
                  " entries, expected " + std::to_string(length) +
                  " (period_count)");
    std::vector<double> v;
    v.reserve(length);
    for (const auto& x : n) v.push_back(number(x, field));
    return v;
  }

  bool is_reference(const YAML::Node& n) const {
    return n && n.IsScalar() && n.Scalar() == kReference;
  }

  bool parameters_reference(const YAML::Node& unit) const {
    YAML::Node p = unit["parameters"];
    if (!p) return false;
    if (!is_reference(p))
      fail(p, "'parameters' accepts only '" + std::string(kReference) + "'");
    return true;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

InitialCommitment parse_initial(const Parser& P, const YAML::Node& n) {
  P.check_keys(n, "initial", {"online", "periods_remaining"});
  InitialCommitment c;
  if (n["online"]) c.online = P.boolean(n["online"], "online");
  P.opt(n, "periods_remaining", c.periods_remaining);
  return c;
}

RegimePair<double> parse_regime_pair(const Parser& P, const YAML::Node& n,
                                     const std::string& what) {
  P.expect_map(n, what);
  RegimePair<double> out;
  std::set<Regime> seen;
  for (const auto& kv : n) {
    auto key = kv.first.as<std::string>();
    Regime r;
    try {
      r = parse_regime(key);
    } catch (const std::invalid_argument&) {
      P.fail(kv.first, "unknown regime '" + key + "' in " + what);
    }
    out[r] = P.number(kv.second, what + "." + key);
    seen.insert(r);
  }
  if (seen.size() != 2) P.fail(n, what + " needs both favorable and unfavorable");
  return out;
}

SeasonalLimits parse_energy_limits(const Parser& P, const YAML::Node& n) {
  if (P.is_reference(n)) return reference::hydro_energy_limits();
  P.expect_map(n, "energy_limits");
  SeasonalLimits out;
  for (const auto& kv : n) {
    auto key = kv.first.as<std::string>();
    Season s;
    try {
      s = parse_season(key);
    } catch (const std::invalid_argument&) {
      P.fail(kv.first, "unknown season '" + key + "' in energy_limits");
    }
    out[s] = parse_regime_pair(P, kv.second, "energy_limits." + key);
  }
  return out;
}

// Unit-level data parsed from the `units` list, before the per-season series
// are attached.
struct UnitDefs {
  Portfolio base;
  std::map<std::string, SeasonalLimits> energy_limits;
  std::map<std::string, YAML::Node> nodes;
  std::set<std::string> fd_explicit_bounds;
};

void parse_drs(const Parser& P, const YAML::Node& n, UnitDefs& defs,
               const std::string& name) {
  P.check_keys(n, "drs unit '" + name + "'",
               {"name", "class", "technology", "parameters", "p_max", "p_min",
                "op_cost", "startup_cost", "shutdown_cost", "min_up",
                "min_down", "daily_energy_limit", "energy_limits", "initial"});
  DrsUnit u;
  Technology tech = Technology::other;
  if (n["technology"]) {
    try {
      tech = parse_technology(P.text(n["technology"], "technology"));
    } catch (const std::invalid_argument& e) {
      P.fail(n["technology"], e.what());
    }
  }
  if (P.parameters_reference(n)) {
    if (tech == Technology::hydro)
      u = reference::hydro();
    else if (tech == Technology::biomass)
      u = reference::biomass();
    else
      P.fail(n, "no reference parameters for drs technology '" +
                    std::string(to_string(tech)) + "'");
  } else {
    for (const char* key : {"p_max", "op_cost"}) P.require(n, key, "drs unit '" + name + "'");
    if (!n["daily_energy_limit"] && !n["energy_limits"])
      P.fail(n, "drs unit '" + name +
                    "' needs daily_energy_limit or energy_limits");
  }
  u.name = name;
  u.technology = tech;
  P.opt(n, "p_max", u.p_max);
  P.opt(n, "p_min", u.p_min);
  P.opt(n, "op_cost", u.op_cost);
  P.opt(n, "startup_cost", u.startup_cost);
  P.opt(n, "shutdown_cost", u.shutdown_cost);
  P.opt(n, "min_up", u.min_up);
  P.opt(n, "min_down", u.min_down);
  P.opt(n, "daily_energy_limit", u.daily_energy_limit);
  if (n["initial"]) u.initial = parse_initial(P, n["initial"]);
  if (n["energy_limits"]) {
    if (n["daily_energy_limit"])
      P.fail(n["daily_energy_limit"],
             "give either daily_energy_limit or energy_limits, not both");
    defs.energy_limits[name] = parse_energy_limits(P, n["energy_limits"]);
  }
  defs.base.drs.push_back(u);
}

void parse_ndrs(const Parser& P, const YAML::Node& n, UnitDefs& defs,
                const std::string& name) {
  P.check_keys(n, "ndrs unit '" + name + "'",
               {"name", "class", "technology", "parameters", "p_min",
                "op_cost"});
  NdrsUnit u;
  Technology tech = Technology::other;
  if (n["technology"]) {
    try {
      tech = parse_technology(P.text(n["technology"], "technology"));
    } catch (const std::invalid_argument& e) {
      P.fail(n["technology"], e.what());
    }
  }
  if (P.parameters_reference(n)) {
    if (tech == Technology::wind)
      u = reference::wind();
    else if (tech == Technology::solar_pv)
      u = reference::solar_pv();
    else
      P.fail(n, "no reference parameters for ndrs technology '" +
                    std::string(to_string(tech)) + "'");
  } else {
    P.require(n, "op_cost", "ndrs unit '" + name + "'");
  }
  u.name = name;
  u.technology = tech;
  P.opt(n, "p_min", u.p_min);
  P.opt(n, "op_cost", u.op_cost);
  defs.base.ndrs.push_back(u);
}

void parse_csp(const Parser& P, const YAML::Node& n, UnitDefs& defs,
               const std::string& name) {
  const std::string what = "csp unit '" + name + "'";
  P.check_keys(n, what,
               {"name", "class", "parameters", "turbine_p_max",
                "turbine_p_min", "efficiency", "startup_loss_mult", "min_up",
                "min_down", "op_cost", "thermal_store", "initial"});
  CspUnit u;
  if (P.parameters_reference(n)) {
    u = reference::csp();
  } else {
    for (const char* key : {"turbine_p_max", "efficiency", "thermal_store"})
      P.require(n, key, what);
  }
  // Not part of the reference table; always explicit.
  P.require(n, "startup_loss_mult", what);
  P.require(n, "turbine_p_min", what);
  u.name = name;
  P.opt(n, "turbine_p_max", u.turbine_p_max);
  P.opt(n, "turbine_p_min", u.turbine_p_min);
  P.opt(n, "efficiency", u.efficiency);
  P.opt(n, "startup_loss_mult", u.startup_loss_mult);
  P.opt(n, "min_up", u.min_up);
  P.opt(n, "min_down", u.min_down);
  P.opt(n, "op_cost", u.op_cost);
  if (YAML::Node ts = n["thermal_store"]) {
    P.check_keys(ts, "thermal_store",
                 {"e_max", "e_min", "charge_p_max", "discharge_p_max",
                  "charge_eff", "discharge_eff"});
    P.opt(ts, "e_max", u.ts.e_max);
    P.opt(ts, "e_min", u.ts.e_min);
    P.opt(ts, "charge_p_max", u.ts.charge_p_max);
    P.opt(ts, "discharge_p_max", u.ts.discharge_p_max);
    P.opt(ts, "charge_eff", u.ts.charge_eff);
    P.opt(ts, "discharge_eff", u.ts.discharge_eff);
  }
  if (n["initial"]) u.initial = parse_initial(P, n["initial"]);
  defs.base.csp.push_back(u);
}

void parse_fd(const Parser& P, const YAML::Node& n, UnitDefs& defs,
              const std::string& name) {
  P.check_keys(n, "fd unit '" + name + "'",
               {"name", "class", "p_min", "p_max", "flexibility_margin"});
  FdUnit u;
  u.name = name;
  u.flexibility_margin = reference::kFlexibilityMargin;
  P.opt(n, "flexibility_margin", u.flexibility_margin);
  if (n["p_min"].IsDefined() != n["p_max"].IsDefined())
    P.fail(n, "fd unit '" + name + "' needs both p_min and p_max, or neither");
  if (n["p_min"]) {
    P.opt(n, "p_min", u.p_min);
    P.opt(n, "p_max", u.p_max);
    defs.fd_explicit_bounds.insert(name);
  }
  defs.base.fd.push_back(u);
}

UnitDefs parse_units(const Parser& P, const YAML::Node& units) {
  if (!units.IsSequence()) P.fail(units, "'units' must be a list");
  UnitDefs defs;
  for (const YAML::Node& n : units) {
    P.expect_map(n, "unit entry");
    auto name = P.text(P.require(n, "name", "unit entry"), "name");
    if (defs.nodes.count(name)) P.fail(n, "duplicate unit name '" + name + "'");
    defs.nodes.emplace(name, n);
    auto cls = P.text(P.require(n, "class", "unit '" + name + "'"), "class");
    if (cls == "drs")
      parse_drs(P, n, defs, name);
    else if (cls == "ndrs")
      parse_ndrs(P, n, defs, name);
    else if (cls == "csp")
      parse_csp(P, n, defs, name);
    else if (cls == "fd")
      parse_fd(P, n, defs, name);
    else
      P.fail(n["class"], "unknown unit class '" + cls +
                             "' (expected drs, ndrs, csp or fd)");
  }
  return defs;
}

EsUnit parse_storage(const Parser& P, const YAML::Node& n) {
  if (P.is_reference(n)) return reference::es_module();
  P.check_keys(n, "storage_module",
               {"parameters", "charge_p_max", "charge_p_min",
                "discharge_p_max", "discharge_p_min", "e_max", "e_min",
                "charge_eff", "discharge_eff", "op_cost"});
  EsUnit u;
  if (P.parameters_reference(n))
    u = reference::es_module();
  else
    for (const char* key : {"charge_p_max", "discharge_p_max", "e_max"})
      P.require(n, key, "storage_module");
  P.opt(n, "charge_p_max", u.charge_p_max);
  P.opt(n, "charge_p_min", u.charge_p_min);
  P.opt(n, "discharge_p_max", u.discharge_p_max);
  P.opt(n, "discharge_p_min", u.discharge_p_min);
  P.opt(n, "e_max", u.e_max);
  P.opt(n, "e_min", u.e_min);
  P.opt(n, "charge_eff", u.charge_eff);
  P.opt(n, "discharge_eff", u.discharge_eff);
  P.opt(n, "op_cost", u.op_cost);
  return u;
}

RegimePair<std::vector<double>> parse_deviation(const Parser& P,
                                                const YAML::Node& n,
                                                const std::string& what,
                                                int T) {
  P.expect_map(n, what);
  RegimePair<std::vector<double>> out;
  std::set<Regime> seen;
  for (const auto& kv : n) {
    auto key = kv.first.as<std::string>();
    Regime r;
    try {
      r = parse_regime(key);
    } catch (const std::invalid_argument&) {
      P.fail(kv.first, "unknown regime '" + key + "' in " + what);
    }
    out[r] = P.series(kv.second, what + "." + key, T);
    seen.insert(r);
  }
  if (seen.size() != 2) P.fail(n, what + " needs both favorable and unfavorable");
  return out;
}

struct SeasonSeries {
  MarketScenario market;
  std::map<std::string, std::vector<double>> upper;
  std::map<std::string, std::vector<std::vector<double>>> profiles;
};

SeasonSeries parse_season_block(const Parser& P, const YAML::Node& n,
                                const std::string& sname, const UnitDefs& defs,
                                const PeriodGrid& grid) {
  const int T = grid.period_count;
  P.check_keys(n, "season '" + sname + "'", {"prices", "series"});
  SeasonSeries out;
  MarketScenario& m = out.market;
  m.grid = grid;
  m.season = parse_season(sname);

  YAML::Node pr = P.require(n, "prices", "season '" + sname + "'");
  P.check_keys(pr, "prices",
               {"dam_median", "dam_down_dev", "dam_up_dev", "sr_up", "sr_down",
                "sr_up_dev", "sr_down_dev"});
  auto price = [&](const char* key) {
    return P.series(P.require(pr, key, "prices"), std::string("prices.") + key,
                    T);
  };
  m.dam_price_median = price("dam_median");
  m.dam_price_down_dev = price("dam_down_dev");
  m.dam_price_up_dev = price("dam_up_dev");
  m.srm_up_price_nominal = price("sr_up");
  m.srm_down_price_nominal = price("sr_down");
  m.srm_up_price_dev = price("sr_up_dev");
  m.srm_down_price_dev = price("sr_down_dev");

  YAML::Node series = n["series"];
  if (series) P.expect_map(series, "series");
  std::set<std::string> seen;
  if (series)
    for (const auto& kv : series) {
      auto unit = kv.first.as<std::string>();
      const YAML::Node& s = kv.second;
      const std::string what = "series." + unit;
      seen.insert(unit);
      bool is_fd = std::any_of(defs.base.fd.begin(), defs.base.fd.end(),
                               [&](const FdUnit& u) { return u.name == unit; });
      bool is_gen =
          std::any_of(defs.base.ndrs.begin(), defs.base.ndrs.end(),
                      [&](const NdrsUnit& u) { return u.name == unit; }) ||
          std::any_of(defs.base.csp.begin(), defs.base.csp.end(),
                      [&](const CspUnit& u) { return u.name == unit; });
      if (is_fd) {
        P.check_keys(s, what, {"profiles", "deviation"});
        YAML::Node ps = P.require(s, "profiles", what);
        if (!ps.IsSequence() || ps.size() == 0)
          P.fail(ps, what + ".profiles must be a non-empty list of series");
        auto& dst = out.profiles[unit];
        for (std::size_t k = 0; k < ps.size(); ++k)
          dst.push_back(P.series(ps[k],
                                 what + ".profiles[" + std::to_string(k) + "]",
                                 T));
      } else if (is_gen) {
        P.check_keys(s, what, {"upper", "deviation"});
        out.upper[unit] = P.series(P.require(s, "upper", what), what + ".upper", T);
      } else if (defs.nodes.count(unit)) {
        P.fail(kv.first, "unit '" + unit + "' takes no series");
      } else {
        P.fail(kv.first, "series for unknown unit '" + unit + "'");
      }
      m.regime_deviations[unit] =
          parse_deviation(P, P.require(s, "deviation", what), what + ".deviation", T);
    }
  auto need = [&](const std::string& unit) {
    if (!seen.count(unit))
      P.fail(n, "season '" + sname + "' has no series for unit '" + unit + "'");
  };
  for (const auto& u : defs.base.ndrs) need(u.name);
  for (const auto& u : defs.base.csp) need(u.name);
  for (const auto& u : defs.base.fd) need(u.name);

  for (const auto& [unit, table] : defs.energy_limits) {
    if (!table.count(*m.season))
      P.fail(defs.nodes.at(unit)["energy_limits"],
             "energy_limits of '" + unit + "' has no season '" + sname + "'");
    m.seasonal_energy_limits[unit] = table;
  }
  return out;
}

}  // namespace

ScenarioSet parse_scenario(const std::string& text, const std::string& origin) {
  Parser P(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(origin + ":" + std::to_string(e.mark.line + 1) + ": " +
                        e.msg);
  }
  P.check_keys(root, "scenario file",
               {"schema_version", "name", "description", "grid",
                "storage_module", "units", "seasons"});

  ScenarioSet set;
  YAML::Node ver = P.require(root, "schema_version", "scenario file");
  set.schema_version = P.integer(ver, "schema_version");
  if (set.schema_version != kScenarioSchemaVersion)
    P.fail(ver, "unsupported schema_version " +
                    std::to_string(set.schema_version) + " (this build reads " +
                    std::to_string(kScenarioSchemaVersion) + ")");
  if (root["name"]) set.name = P.text(root["name"], "name");
  if (root["description"])
    set.description = P.text(root["description"], "description");

  if (YAML::Node g = root["grid"]) {
    P.check_keys(g, "grid", {"period_count", "delta_t"});
    P.opt(g, "period_count", set.grid.period_count);
    P.opt(g, "delta_t", set.grid.delta_t);
    if (set.grid.period_count < 1) P.fail(g, "grid.period_count must be >= 1");
    if (!(set.grid.delta_t > 0.0)) P.fail(g, "grid.delta_t must be > 0");
  }

  set.es_module = reference::es_module();
  if (YAML::Node es = root["storage_module"]) {
    set.es_module = parse_storage(P, es);
    auto errs = validate_es_unit(set.es_module);
    if (!errs.empty()) P.fail(es, "storage_module: " + errs.front());
  }

  UnitDefs defs = parse_units(P, P.require(root, "units", "scenario file"));
  if (defs.base.empty()) P.fail(root["units"], "'units' is empty");

  YAML::Node seasons = P.require(root, "seasons", "scenario file");
  P.expect_map(seasons, "seasons");
  if (seasons.size() == 0) P.fail(seasons, "'seasons' is empty");
  std::map<Season, SeasonSeries> parsed;
  for (const auto& kv : seasons) {
    auto sname = kv.first.as<std::string>();
    Season s;
    try {
      s = parse_season(sname);
    } catch (const std::invalid_argument&) {
      P.fail(kv.first, "unknown season '" + sname + "'");
    }
    parsed[s] = parse_season_block(P, kv.second, sname, defs, set.grid);
  }

  // FD bounds not given in the file follow the flexibility margin around the
  // profile range over every season, so the unit is the same all year.
  for (auto& u : defs.base.fd) {
    if (defs.fd_explicit_bounds.count(u.name)) continue;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& [_, ss] : parsed)
      for (const auto& prof : ss.profiles.at(u.name))
        for (double x : prof) lo = std::min(lo, x), hi = std::max(hi, x);
    u.p_min = (1.0 - u.flexibility_margin) * lo;
    u.p_max = (1.0 + u.flexibility_margin) * hi;
  }

  for (auto& [season, ss] : parsed) {
    Portfolio p = defs.base;
    for (auto& u : p.ndrs) u.forecast_upper = ss.upper.at(u.name);
    for (auto& u : p.csp) u.sf_thermal_upper = ss.upper.at(u.name);
    for (auto& u : p.fd) u.profiles = ss.profiles.at(u.name);
    // Stored in the favorable regime; `at` switches.
    auto [fp, fm] = apply_regime(std::move(p), std::move(ss.market),
                                 Regime::favorable);
    for (Regime r : kAllRegimes) {
      auto [rp, rm] = apply_regime(fp, fm, r);
      auto errs = validate_portfolio(rp, rm);
      if (!errs.empty())
        P.fail(seasons[std::string(to_string(season))],
               "season " + std::string(to_string(season)) + ", " +
                   std::string(to_string(r)) + " regime: " + errs.front() +
                   (errs.size() > 1
                        ? " (and " + std::to_string(errs.size() - 1) + " more)"
                        : ""));
    }
    set.portfolios[season] = std::move(fp);
    set.markets[season] = std::move(fm);
  }
  return set;
}

ScenarioSet load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

namespace {

std::string num(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  return out + "]";
}

void emit_initial(std::ostream& o, const InitialCommitment& c) {
  o << "    initial: {online: " << (c.online ? "true" : "false")
    << ", periods_remaining: " << c.periods_remaining << "}\n";
}

}  // namespace

std::string emit_scenario(const ScenarioSet& set) {
  if (set.portfolios.empty())
    throw std::invalid_argument("emit_scenario: no seasons");
  const Portfolio& base = set.portfolios.begin()->second;
  const MarketScenario& m0 = set.markets.begin()->second;
  std::ostringstream o;
  o << "schema_version: " << set.schema_version << "\n";
  o << "name: " << quoted(set.name) << "\n";
  o << "description: " << quoted(set.description) << "\n";
  o << "grid: {period_count: " << set.grid.period_count
    << ", delta_t: " << num(set.grid.delta_t) << "}\n";
  const EsUnit& e = set.es_module;
  o << "storage_module:\n"
    << "  charge_p_max: " << num(e.charge_p_max) << "\n"
    << "  charge_p_min: " << num(e.charge_p_min) << "\n"
    << "  discharge_p_max: " << num(e.discharge_p_max) << "\n"
    << "  discharge_p_min: " << num(e.discharge_p_min) << "\n"
    << "  e_max: " << num(e.e_max) << "\n"
    << "  e_min: " << num(e.e_min) << "\n"
    << "  charge_eff: " << num(e.charge_eff) << "\n"
    << "  discharge_eff: " << num(e.discharge_eff) << "\n"
    << "  op_cost: " << num(e.op_cost) << "\n";

  o << "units:\n";
  for (const auto& u : base.drs) {
    o << "  - name: " << quoted(u.name) << "\n    class: drs\n"
      << "    technology: " << to_string(u.technology) << "\n"
      << "    p_max: " << num(u.p_max) << "\n"
      << "    p_min: " << num(u.p_min) << "\n"
      << "    op_cost: " << num(u.op_cost) << "\n"
      << "    startup_cost: " << num(u.startup_cost) << "\n"
      << "    shutdown_cost: " << num(u.shutdown_cost) << "\n"
      << "    min_up: " << u.min_up << "\n"
      << "    min_down: " << u.min_down << "\n";
    auto lim = m0.seasonal_energy_limits.find(u.name);
    if (lim == m0.seasonal_energy_limits.end()) {
      o << "    daily_energy_limit: " << num(u.daily_energy_limit) << "\n";
    } else {
      o << "    energy_limits:\n";
      for (const auto& [s, pair] : lim->second)
        o << "      " << to_string(s) << ": {favorable: "
          << num(pair.favorable) << ", unfavorable: " << num(pair.unfavorable)
          << "}\n";
    }
    emit_initial(o, u.initial);
  }
  for (const auto& u : base.ndrs)
    o << "  - name: " << quoted(u.name) << "\n    class: ndrs\n"
      << "    technology: " << to_string(u.technology) << "\n"
      << "    p_min: " << num(u.p_min) << "\n"
      << "    op_cost: " << num(u.op_cost) << "\n";
  for (const auto& u : base.csp) {
    o << "  - name: " << quoted(u.name) << "\n    class: csp\n"
      << "    turbine_p_max: " << num(u.turbine_p_max) << "\n"
      << "    turbine_p_min: " << num(u.turbine_p_min) << "\n"
      << "    efficiency: " << num(u.efficiency) << "\n"
      << "    startup_loss_mult: " << num(u.startup_loss_mult) << "\n"
      << "    min_up: " << u.min_up << "\n"
      << "    min_down: " << u.min_down << "\n"
      << "    op_cost: " << num(u.op_cost) << "\n"
      << "    thermal_store: {e_max: " << num(u.ts.e_max)
      << ", e_min: " << num(u.ts.e_min)
      << ", charge_p_max: " << num(u.ts.charge_p_max)
      << ", discharge_p_max: " << num(u.ts.discharge_p_max)
      << ", charge_eff: " << num(u.ts.charge_eff)
      << ", discharge_eff: " << num(u.ts.discharge_eff) << "}\n";
    emit_initial(o, u.initial);
  }
  for (const auto& u : base.fd)
    o << "  - name: " << quoted(u.name) << "\n    class: fd\n"
      << "    p_min: " << num(u.p_min) << "\n"
      << "    p_max: " << num(u.p_max) << "\n"
      << "    flexibility_margin: " << num(u.flexibility_margin) << "\n";

  o << "seasons:\n";
  for (const auto& [season, m] : set.markets) {
    const Portfolio& p = set.portfolios.at(season);
    o << "  " << to_string(season) << ":\n    prices:\n"
      << "      dam_median: " << list(m.dam_price_median) << "\n"
      << "      dam_down_dev: " << list(m.dam_price_down_dev) << "\n"
      << "      dam_up_dev: " << list(m.dam_price_up_dev) << "\n"
      << "      sr_up: " << list(m.srm_up_price_nominal) << "\n"
      << "      sr_down: " << list(m.srm_down_price_nominal) << "\n"
      << "      sr_up_dev: " << list(m.srm_up_price_dev) << "\n"
      << "      sr_down_dev: " << list(m.srm_down_price_dev) << "\n";
    if (p.ndrs.empty() && p.csp.empty() && p.fd.empty()) continue;
    o << "    series:\n";
    auto deviation = [&](const std::string& unit) {
      const auto& d = m.regime_deviations.at(unit);
      o << "        deviation:\n"
        << "          favorable: " << list(d.favorable) << "\n"
        << "          unfavorable: " << list(d.unfavorable) << "\n";
    };
    for (const auto& u : p.ndrs) {
      o << "      " << quoted(u.name) << ":\n        upper: "
        << list(u.forecast_upper) << "\n";
      deviation(u.name);
    }
    for (const auto& u : p.csp) {
      o << "      " << quoted(u.name) << ":\n        upper: "
        << list(u.sf_thermal_upper) << "\n";
      deviation(u.name);
    }
    for (const auto& u : p.fd) {
      o << "      " << quoted(u.name) << ":\n        profiles:\n";
      for (const auto& prof : u.profiles) o << "          - " << list(prof) << "\n";
      deviation(u.name);
    }
  }
  return o.str();
}

void write_scenario(const ScenarioSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << emit_scenario(set);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace rvpp
