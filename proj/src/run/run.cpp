#include "rvpp/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "rvpp/backends.hpp"
#include "rvpp/es_model.hpp"
#include "rvpp/oracle.hpp"
#include "rvpp/sizing.hpp"

namespace rvpp::run {

using json = nlohmann::json;

namespace {

bool is_strategy(const std::string& s) {
  if (s == kDeterministic) return true;
  try {
    parse_strategy(s);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

constexpr std::string_view kWithout = "without_";

std::optional<Technology> without_tech(const std::string& configuration) {
  if (configuration.rfind(kWithout, 0) != 0) return std::nullopt;
  return parse_technology(configuration.substr(kWithout.size()));
}

bool has_technology(const Portfolio& p, Technology t) {
  for (const auto& u : p.drs)
    if (u.technology == t) return true;
  for (const auto& u : p.ndrs)
    if (u.technology == t) return true;
  if (t == Technology::csp) return !p.csp.empty();
  if (t == Technology::flexible_demand) return !p.fd.empty();
  return false;
}

std::string configuration_label(const std::string& configuration,
                                double fd_scale) {
  if (fd_scale == 100.0) return configuration;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", fd_scale);
  return configuration + "+fd" + buf + "%";
}

BudgetSet budgets_for(const std::string& strategy, const Portfolio& p) {
  if (strategy == kDeterministic) return {};
  return strategy_budgets(strategy, p);
}

bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::max(std::fabs(a),
                                                          std::fabs(b)));
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

std::vector<double> scaled(std::vector<double> v, double k) {
  for (double& x : v) x *= k;
  return v;
}

// Builds, solves and decodes the portfolio model. Infeasibility is explained
// with the elastic probe before giving up.
std::pair<RvppDecoded, double> solve_rvpp(const Portfolio& p,
                                          const MarketScenario& s,
                                          const BudgetSet& b,
                                          const RvppModelOptions& opts,
                                          const milp::BackendFactory& backend) {
  auto m = build_robust_rvpp(p, s, b, milp::kDefaultBigM, opts);
  auto sol = milp::solve(m, backend);
  if (sol.status == milp::SolveStatus::infeasible) {
    std::string why = "RVPP model infeasible";
    if (auto d = milp::diagnose_infeasibility(m, backend))
      why += "; largest conflict in constraint family '" + d->family +
             "' (row " + d->constraint + ", slack " +
             format_number(d->slack) + ")";
    else
      why += "; relaxation probe did not solve";
    throw SolveFailure(why);
  }
  if (!sol.optimal())
    throw SolveFailure("RVPP model: solver status " +
                       std::string(milp::to_string(sol.status)));
  return {extract_rvpp_schedule(m, sol, p, s, opts), sol.objective_value};
}

void gate_rvpp(CellOutcome& out, const RvppSchedule& sched, const Portfolio& p,
               const MarketScenario& s, const BudgetSet& b,
               const RvppModelOptions& opts, const RunConfig& c) {
  auto replay = oracle::replay_schedule(sched, p, s, opts);
  out.replay_worst = std::max(out.replay_worst, replay.worst());
  if (!replay.ok()) {
    std::string msg = "replay failed:";
    for (const auto& f : replay.flags) msg += " " + f;
    for (const auto& [family, r] : replay.residual)
      if (r > milp::kFeasibilityTol)
        msg += " " + family + "=" + format_number(r);
    throw std::runtime_error(msg);
  }
  oracle::AuditOptions ao;
  ao.tol = c.audit_tol;
  auto audit = oracle::audit_robust_feasibility(sched, p, s, b, ao);
  out.audit_realizations += audit.realizations;
  out.audit_exhaustive = out.audit_exhaustive && audit.exhaustive;
  if (!audit.ok()) {
    const auto& v = audit.violations.front();
    throw std::runtime_error(
        "robust audit: " + std::to_string(audit.violations.size()) +
        " violation(s), first " + v.family + " of '" + v.unit + "' at period " +
        std::to_string(v.period) + " by " + format_number(v.amount));
  }
  auto wc = oracle::worst_case_profit(sched, p, s, b);
  if (!close(wc.profit, sched.objective, c.objective_tol))
    throw std::runtime_error("worst-case profit " + format_number(wc.profit) +
                             " differs from the objective " +
                             format_number(sched.objective));
}

void gate_es(CellOutcome& out, const EsSchedule& sched, const EsFleet& fleet,
             const MarketScenario& s, const BudgetSet& b,
             const EsModelOptions& opts, const RunConfig& c) {
  auto replay = oracle::replay_schedule(sched, fleet, s, opts);
  out.replay_worst = std::max(out.replay_worst, replay.worst());
  if (!replay.ok()) {
    std::string msg = "storage replay failed:";
    for (const auto& f : replay.flags) msg += " " + f;
    throw std::runtime_error(msg);
  }
  auto wc = oracle::worst_case_profit(sched, fleet, s, price_budgets(b));
  if (!close(wc.profit, sched.objective, c.objective_tol))
    throw std::runtime_error("storage worst-case profit " +
                             format_number(wc.profit) +
                             " differs from the objective " +
                             format_number(sched.objective));
}

void fill_rvpp_series(ResultRow& row, const RvppSchedule& sched) {
  const double dt = sched.grid.delta_t;
  row.energy.push_back({"rvpp", sched.p_da});
  row.up.push_back({"rvpp", sched.r_sr_up});
  row.down.push_back({"rvpp", sched.r_sr_dn});
  for (const auto& u : sched.units) {
    row.energy.push_back({u.name, u.p});
    row.up.push_back({u.name, u.r_up});
    row.down.push_back({u.name, u.r_dn});
  }
  for (const auto& c : sched.csp) row.soc.push_back({c.name + ".ts", c.ts_energy});
  row.objective = sched.objective;
  row.nominal_profit = sched.nominal_profit;
  row.traded_energy = sum(scaled(sched.p_da, dt));
  row.reserve_up = sum(sched.r_sr_up);
  row.reserve_down = sum(sched.r_sr_dn);
}

void fill_es_series(ResultRow& row, const EsSchedule& es) {
  row.energy.push_back({"es", es.p_net});
  row.energy.push_back({"es.charge", es.p_ch});
  row.energy.push_back({"es.discharge", es.p_dis});
  row.up.push_back({"es", es.r_up});
  row.down.push_back({"es", es.r_dn});
  row.soc.push_back({"es", es.soc});
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> errs;
  if (c.case_id < 1 || c.case_id > 4)
    errs.push_back("case must be 1, 2, 3 or 4");
  if (c.scenario.empty()) errs.push_back("scenario path is required");
  if (c.out.empty()) errs.push_back("output directory is required");
  for (const auto& s : c.strategies)
    if (!is_strategy(s))
      errs.push_back("unknown strategy '" + s +
                     "' (deterministic, optimistic, balanced, pessimistic)");
  for (const auto& k : c.configurations) {
    if (k == kFull) continue;
    try {
      if (!without_tech(k))
        errs.push_back("unknown configuration '" + k +
                       "' (full or without_<technology>)");
    } catch (const std::invalid_argument& e) {
      errs.push_back("configuration '" + k + "': " + e.what());
    }
  }
  for (double f : c.fd_scales)
    if (!(f >= 0.0) || !std::isfinite(f))
      errs.push_back("FD scale must be a finite percentage >= 0");
  if (c.max_modules < 1) errs.push_back("max_modules must be >= 1");
  if (c.jobs < 1) errs.push_back("jobs must be >= 1");
  if (!(c.objective_tol > 0.0)) errs.push_back("objective tolerance must be > 0");
  if (!(c.audit_tol > 0.0)) errs.push_back("audit tolerance must be > 0");
  if (c.case_id == 1 || c.case_id == 2) {
    bool ablated =
        std::any_of(c.configurations.begin(), c.configurations.end(),
                    [](const std::string& k) { return k != kFull; }) ||
        std::any_of(c.fd_scales.begin(), c.fd_scales.end(),
                    [](double f) { return f != 100.0; });
    if (ablated)
      errs.push_back("configurations and FD scales apply to cases 3 and 4");
  }
  return errs;
}

std::vector<Cell> expand_cells(const RunConfig& c, const ScenarioSet& set) {
  std::vector<Season> seasons = c.seasons.empty() ? set.seasons() : c.seasons;
  std::vector<Regime> regimes = c.regimes;
  if (regimes.empty()) {
    if (c.case_id == 2)
      regimes.assign(std::begin(kAllRegimes), std::end(kAllRegimes));
    else
      regimes = {Regime::favorable};
  }
  std::vector<std::string> strategies = c.strategies;
  if (strategies.empty()) {
    if (c.case_id == 1) strategies = {kDeterministic};
    strategies.push_back(std::string(to_string(Strategy::optimistic)));
    if (c.case_id != 1)
      for (Strategy k : {Strategy::balanced, Strategy::pessimistic})
        strategies.push_back(std::string(to_string(k)));
  }

  // (configuration, FD scale) pairs.
  std::vector<std::pair<std::string, double>> configs;
  if (c.case_id == 3 && c.configurations.empty() && c.fd_scales.empty()) {
    const Portfolio& p = set.portfolios.begin()->second;
    configs.push_back({kFull, 100.0});
    for (Technology t : {Technology::hydro, Technology::biomass,
                         Technology::wind, Technology::solar_pv,
                         Technology::csp, Technology::flexible_demand})
      if (has_technology(p, t))
        configs.push_back({std::string(kWithout) + std::string(to_string(t)),
                           100.0});
    if (has_technology(p, Technology::flexible_demand))
      for (double f : {0.0, 50.0, 150.0}) configs.push_back({kFull, f});
  } else {
    auto ks = c.configurations.empty() ? std::vector<std::string>{kFull}
                                       : c.configurations;
    auto fs = c.fd_scales.empty() ? std::vector<double>{100.0} : c.fd_scales;
    for (const auto& k : ks)
      for (double f : fs) configs.push_back({k, f});
  }

  std::vector<Cell> cells;
  for (Season se : seasons)
    for (Regime r : regimes)
      for (const auto& k : strategies)
        for (const auto& [conf, f] : configs) {
          Cell cell;
          cell.season = se;
          cell.regime = r;
          cell.strategy = k;
          cell.configuration = conf;
          cell.fd_scale = f;
          cell.key = {c.case_id, std::string(to_string(se)),
                      std::string(to_string(r)), k,
                      configuration_label(conf, f)};
          cells.push_back(std::move(cell));
        }
  return cells;
}

CellOutcome run_cell(const Cell& cell, const ScenarioSet& set,
                     const RunConfig& c, const milp::BackendFactory& backend) {
  CellOutcome out;
  out.cell = cell;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto [p, s] = set.at(cell.season, cell.regime);
    if (auto t = without_tech(cell.configuration)) {
      if (!has_technology(p, *t))
        throw std::invalid_argument("portfolio has no " +
                                    std::string(to_string(*t)) + " unit");
      p = without_technology(p, *t);
    }
    if (cell.fd_scale != 100.0)
      p = scale_flexible_demand(p, cell.fd_scale / 100.0);
    if (p.empty()) throw std::invalid_argument("configuration leaves no units");
    const BudgetSet b = budgets_for(cell.strategy, p);

    RvppModelOptions ro;
    ro.literal_3c = c.literal_3c;
    ro.generation_robustness = c.generation_robustness;
    EsModelOptions eo;
    eo.symmetric_sigma_margins = c.symmetric_sigma_margins;

    auto [decoded, profit] = solve_rvpp(p, s, b, ro, backend);
    gate_rvpp(out, decoded.schedule, p, s, b, ro, c);

    ResultRow row;
    row.key = cell.key;
    fill_rvpp_series(row, decoded.schedule);
    row.objective = profit;

    if (c.case_id >= 3) {
      auto gap = aggregation_gap(std::move(decoded), profit,
                                 individual_profits(p, s, b, backend, ro));
      row.sum_individual = gap.sum_individual;
      row.aggregation_gap = gap.gap;
      row.unit_profits = gap.individual;

      SizingOptions so;
      so.max_modules = c.max_modules;
      so.accelerate = c.accelerate;
      so.es = eo;
      auto sized = size_es_to_match(gap.gap, set.es_module, s, b, backend, so);
      out.sizing_iterations = sized.iterations;
      if (sized.status != SizingStatus::matched)
        throw std::runtime_error(
            "gap of " + format_number(gap.gap) + " EUR is not matchable within " +
            std::to_string(c.max_modules) + " storage modules");
      const EsFleet fleet{set.es_module, sized.module_count};
      gate_es(out, *sized.schedule, fleet, s, b, eo, c);
      row.es_modules = sized.module_count;
      row.es_objective = sized.es_objective;
      if (c.case_id == 4) {
        // The storage schedule replaces the RVPP series.
        row.energy.clear();
        row.up.clear();
        row.down.clear();
        row.soc.clear();
        fill_es_series(row, *sized.schedule);
        row.objective = sized.schedule->objective;
        row.nominal_profit = sized.schedule->nominal_profit;
        row.traded_energy =
            sum(scaled(sized.schedule->p_net, sized.schedule->grid.delta_t));
        row.reserve_up = sum(sized.schedule->r_up);
        row.reserve_down = sum(sized.schedule->r_dn);
      }
    }
    out.row = std::move(row);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

namespace {

json manifest(const RunConfig& c, const ScenarioSet& set,
              const std::string& backend, const RunReport& r,
              double seconds) {
  json cfg = {
      {"case", c.case_id},
      {"scenario", c.scenario.string()},
      {"backend", backend},
      {"max_modules", c.max_modules},
      {"accelerate", c.accelerate},
      {"literal_3c", c.literal_3c},
      {"symmetric_sigma_margins", c.symmetric_sigma_margins},
      {"generation_robustness",
       std::string(to_string(c.generation_robustness))},
      {"objective_tol", c.objective_tol},
      {"audit_tol", c.audit_tol},
      {"jobs", c.jobs},
  };
  json cells = json::array();
  for (const auto& o : r.cells) {
    json j = {
        {"case", o.cell.key.case_id},
        {"season", o.cell.key.season},
        {"regime", o.cell.key.regime},
        {"strategy", o.cell.key.strategy},
        {"configuration", o.cell.key.configuration},
        {"status", o.row ? "ok" : "failed"},
        {"seconds", o.seconds},
        {"audit_realizations", o.audit_realizations},
        {"audit_exhaustive", o.audit_exhaustive},
        {"replay_worst_residual", o.replay_worst},
    };
    if (o.sizing_iterations) j["sizing_solves"] = o.sizing_iterations;
    if (!o.row) j["error"] = o.error;
    cells.push_back(std::move(j));
  }
  json files = json::array();
  for (const auto& f : r.files) files.push_back(f.filename().string());
  return {
      {"scenario_name", set.name},
      {"config", cfg},
      {"cells", cells},
      {"failures", r.failures},
      {"files", files},
      {"total_seconds", seconds},
  };
}

}  // namespace

RunReport run(const RunConfig& c,
              const std::function<void(const CellOutcome&)>& progress) {
  auto errs = validate_config(c);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  ScenarioSet set;
  try {
    set = load_scenario(c.scenario);
  } catch (const ScenarioError& e) {
    throw ConfigError(e.what());
  }
  for (Season s : c.seasons)
    if (!set.markets.count(s))
      throw ConfigError("scenario has no season '" +
                        std::string(to_string(s)) + "'");
  const std::string backend_name =
      c.backend.empty() ? default_backend_name() : c.backend;
  milp::BackendFactory backend;
  try {
    backend = backend_factory(backend_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto t0 = std::chrono::steady_clock::now();
  const auto cells = expand_cells(c, set);
  RunReport report;
  report.cells.resize(cells.size());
  const int n = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(c.jobs)
  for (int i = 0; i < n; ++i) {
    report.cells[i] = run_cell(cells[i], set, c, backend);
    if (progress) {
#pragma omp critical(rvpp_progress)
      progress(report.cells[i]);
    }
  }

  for (const auto& o : report.cells) {
    if (o.row)
      report.table.rows.push_back(*o.row);
    else
      ++report.failures;
  }
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (!report.table.rows.empty()) report.files = write_results(report.table, c.out);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream mf(c.out / kManifestFile, std::ios::binary | std::ios::trunc);
  if (!mf)
    throw std::runtime_error((c.out / kManifestFile).string() +
                             ": cannot write");
  mf << manifest(c, set, backend_name, report, seconds).dump(2) << "\n";
  return report;
}

}  // namespace rvpp::run
