// Acceptance run on the shipped synthetic dataset. Prints one PASS/FAIL line
// per criterion and exits nonzero if any fails. Tolerances are fixed below.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rvpp/backends.hpp"
#include "rvpp/es_model.hpp"
#include "rvpp/oracle.hpp"
#include "rvpp/reference_data.hpp"
#include "rvpp/run.hpp"
#include "rvpp/rvpp_model.hpp"
#include "rvpp/scenario_io.hpp"
#include "rvpp/sizing.hpp"

using namespace rvpp;
namespace fs = std::filesystem;

namespace {

constexpr double kObjTol = 1e-6;          // relative to max(1, |objective|)
constexpr double kSolveLimit = 60.0;      // seconds per solve
constexpr double kSuperTol = 1e-6;        // EUR
constexpr double kAuditTol = 1e-9;        // MW
constexpr double kSocCycleTol = 1e-6;     // MWh
constexpr double kArbitrageTol = 1e-6;    // EUR
constexpr double kBruteTol = 1e-9;        // EUR, summation order only
constexpr double kSweepLimit = 30 * 60.0; // seconds

const std::string kScenario =
    std::string(RVPP_SOURCE_DIR) + "/data/reference_synthetic.yaml";

const std::vector<std::string> kLadder = {"deterministic", "optimistic",
                                          "balanced", "pessimistic"};
constexpr int kFleet = 100;  // modules of the storage fleet in criteria 1, 2

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

BudgetSet budgets(const std::string& k, const Portfolio& p) {
  return k == "deterministic" ? BudgetSet{} : strategy_budgets(k, p);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Timed {
  milp::Solution sol;
  double seconds = 0.0;
};

Timed timed_solve(const milp::Model& m, const milp::BackendFactory& be) {
  auto t0 = Clock::now();
  Timed t{milp::solve(m, be), 0.0};
  t.seconds = since(t0);
  return t;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Everything gathered once and judged by several criteria.
struct Evidence {
  double max_solve_seconds = 0.0;
  // criterion 1
  double zero_budget_rvpp = 0.0, zero_budget_es = 0.0;
  int zero_budget_pairs = 0;
  // criterion 2
  int mono_checks = 0, mono_violations = 0;
  std::vector<std::string> mono_notes;
  // criterion 3
  int super_checks = 0, super_violations = 0;
  double min_gap = INFINITY;
  // criterion 4
  int dual_checks = 0;
  double dual_worst = 0.0;
  bool brute_ok = true;
  std::string brute_note;
  // criterion 5
  int audit_schedules = 0, audit_violations = 0, audit_exhaustive_toys = 0;
  bool counterexample_caught = false;
  std::string audit_note;
  // criterion 6
  int sizing_runs = 0, sizing_nonminimal = 0, sizing_nonmonotone = 0;
  std::vector<std::string> sizing_notes;
  // criterion 7
  int es_schedules = 0, es_bad = 0;
  double soc_cycle_worst = 0.0, arbitrage_err = INFINITY;
  std::string es_note;
  // criterion 8
  int fd_cells = 0, fd_bad = 0;
  std::vector<std::string> fd_notes;
};

void note_rvpp(Evidence& ev, const RvppDecoded& d, const Portfolio& p,
               const MarketScenario& s, const BudgetSet& b) {
  auto wc = oracle::worst_case_profit(d.schedule, p, s, b);
  ++ev.dual_checks;
  ev.dual_worst = std::max(ev.dual_worst, rel_diff(wc.profit, d.schedule.objective));
  oracle::AuditOptions ao;
  ao.tol = kAuditTol;
  auto audit = oracle::audit_robust_feasibility(d.schedule, p, s, b, ao);
  ++ev.audit_schedules;
  if (!audit.ok()) {
    ev.audit_violations += static_cast<int>(audit.violations.size());
    ev.audit_note = audit.violations.front().family + " of " +
                    audit.violations.front().unit;
  }
}

void note_es(Evidence& ev, const EsSchedule& es, const EsFleet& fleet,
             const MarketScenario& s, const BudgetSet& price_b) {
  auto wc = oracle::worst_case_profit(es, fleet, s, price_b);
  ++ev.dual_checks;
  ev.dual_worst = std::max(ev.dual_worst, rel_diff(wc.profit, es.objective));
  ++ev.es_schedules;
  auto v = es_violations(es, fleet, {}, milp::kFeasibilityTol);
  bool exclusive = true;
  for (std::size_t t = 0; t < es.p_ch.size(); ++t)
    if (es.p_ch[t] != 0.0 && es.p_dis[t] != 0.0) exclusive = false;
  double cycle = std::fabs(es.soc.front() - es.soc.back());
  ev.soc_cycle_worst = std::max(ev.soc_cycle_worst, cycle);
  if (!v.empty() || !exclusive || cycle > kSocCycleTol) {
    ++ev.es_bad;
    ev.es_note = !v.empty() ? v.front() : !exclusive ? "mode clash" : "soc cycle";
  }
}

void note_gap(Evidence& ev, const AggregationGap& g) {
  ++ev.super_checks;
  ev.min_gap = std::min(ev.min_gap, g.gap);
  if (g.rvpp_profit < g.sum_individual - kSuperTol) ++ev.super_violations;
}

// Criteria 1, 2 (and inputs to 4, 5, 7) over every season, regime and
// strategy of the shipped dataset.
void ladder_runs(Evidence& ev, const ScenarioSet& set,
                 const milp::BackendFactory& be) {
  for (Season se : set.seasons())
    for (Regime r : kAllRegimes) {
      auto [p, s] = set.at(se, r);
      const EsFleet fleet{set.es_module, kFleet};
      const std::string cell = std::string(to_string(se)) + "/" +
                               std::string(to_string(r));

      auto det = timed_solve(build_deterministic_rvpp(p, s), be);
      auto det_es = timed_solve(build_deterministic_es(fleet, s), be);
      ev.max_solve_seconds =
          std::max({ev.max_solve_seconds, det.seconds, det_es.seconds});

      double prev_rvpp = INFINITY, prev_es = INFINITY;
      for (const auto& k : kLadder) {
        BudgetSet b = budgets(k, p);
        auto m = build_robust_rvpp(p, s, b);
        auto t = timed_solve(m, be);
        auto d = extract_rvpp_schedule(m, t.sol, p, s);
        auto me = build_robust_es(fleet, s, price_budgets(b));
        auto te = timed_solve(me, be);
        auto es = extract_es_schedule(me, te.sol, fleet, s);
        ev.max_solve_seconds =
            std::max({ev.max_solve_seconds, t.seconds, te.seconds});
        note_rvpp(ev, d, p, s, b);
        note_es(ev, es, fleet, s, price_budgets(b));

        if (k == "deterministic") {
          ++ev.zero_budget_pairs;
          ev.zero_budget_rvpp = std::max(
              ev.zero_budget_rvpp,
              rel_diff(t.sol.objective_value, det.sol.objective_value));
          ev.zero_budget_es = std::max(
              ev.zero_budget_es,
              rel_diff(te.sol.objective_value, det_es.sol.objective_value));
        } else {
          ev.mono_checks += 2;
          auto up = [&](double now, double prev) {
            return now > prev + kObjTol * std::max(1.0, std::fabs(prev));
          };
          if (up(t.sol.objective_value, prev_rvpp)) {
            ++ev.mono_violations;
            ev.mono_notes.push_back("rvpp " + cell + " " + k);
          }
          if (up(te.sol.objective_value, prev_es)) {
            ++ev.mono_violations;
            ev.mono_notes.push_back("es " + cell + " " + k);
          }
        }
        prev_rvpp = t.sol.objective_value;
        prev_es = te.sol.objective_value;
      }
    }
}

// Criterion 6 (and 3, 4, 7): size the fleet for every season, regime and
// ladder strategy; confirm N and N-1 with separate solves.
void sizing_runs(Evidence& ev, const ScenarioSet& set,
                 const milp::BackendFactory& be,
                 std::map<std::string, double>& gap_at_100) {
  for (Season se : set.seasons())
    for (Regime r : kAllRegimes) {
      auto [p, s] = set.at(se, r);
      int prev = 0;
      for (Strategy k : kStrategyLadder) {
        const std::string cell = std::string(to_string(se)) + "/" +
                                 std::string(to_string(r)) + "/" +
                                 std::string(to_string(k));
        BudgetSet b = strategy_budgets(k, p);
        auto g = aggregation_gap(p, s, b, be);
        note_gap(ev, g);
        note_rvpp(ev, g.rvpp, p, s, b);
        gap_at_100[cell] = g.gap;
        SizingOptions so;
        so.accelerate = true;
        auto sized = size_es_to_match(g.gap, set.es_module, s, b, be, so);
        ++ev.sizing_runs;
        if (sized.status != SizingStatus::matched) {
          ++ev.sizing_nonminimal;
          ev.sizing_notes.push_back(cell + " not matchable");
          continue;
        }
        const int n = sized.module_count;
        bool feasible = es_floor_solve(set.es_module, n, s, b, g.gap, be).has_value();
        bool below = n > 1 &&
                     es_floor_solve(set.es_module, n - 1, s, b, g.gap, be).has_value();
        if (!feasible || below) {
          ++ev.sizing_nonminimal;
          ev.sizing_notes.push_back(cell + " N=" + std::to_string(n));
        }
        if (n < prev) {
          ++ev.sizing_nonmonotone;
          ev.sizing_notes.push_back(cell + " N fell to " + std::to_string(n));
        }
        prev = n;
        note_es(ev, *sized.schedule, {set.es_module, n}, s, price_budgets(b));
      }
    }
}

// Criterion 8 (and 3).
void fd_scale_runs(Evidence& ev, const ScenarioSet& set,
                   const milp::BackendFactory& be,
                   const std::map<std::string, double>& gap_at_100) {
  for (Season se : set.seasons())
    for (Regime r : kAllRegimes) {
      auto [p, s] = set.at(se, r);
      for (Strategy k : kStrategyLadder) {
        const std::string cell = std::string(to_string(se)) + "/" +
                                 std::string(to_string(r)) + "/" +
                                 std::string(to_string(k));
        double g[4];
        const double scale[4] = {0.0, 0.5, 1.0, 1.5};
        for (int i = 0; i < 4; ++i) {
          if (scale[i] == 1.0) {
            g[i] = gap_at_100.at(cell);
            continue;
          }
          auto ps = scale_flexible_demand(p, scale[i]);
          auto ag = aggregation_gap(ps, s, strategy_budgets(k, ps), be);
          note_gap(ev, ag);
          g[i] = ag.gap;
        }
        ++ev.fd_cells;
        bool rising = g[0] < g[1] && g[1] < g[2] && g[2] < g[3];
        bool concave = (g[2] - g[1]) - (g[1] - g[0]) < 0.0 &&
                       (g[3] - g[2]) - (g[2] - g[1]) < 0.0;
        if (!rising || !concave) {
          ++ev.fd_bad;
          std::ostringstream o;
          o << cell << " gaps " << g[0] << "/" << g[1] << "/" << g[2] << "/"
            << g[3];
          ev.fd_notes.push_back(o.str());
        }
      }
    }
}

// T = 6 toys: wind plus a flexible demand, price and wind uncertainty.
std::pair<Portfolio, MarketScenario> toy6() {
  const int T = 6;
  MarketScenario s;
  s.grid.period_count = T;
  s.season = Season::winter;
  s.dam_price_median = {50, 62, 41, 70, 55, 47};
  s.dam_price_down_dev = {6, 11, 4, 9, 7, 3};
  s.dam_price_up_dev = {5, 9, 3, 8, 6, 2};
  s.srm_up_price_nominal.assign(T, 0.0);
  s.srm_down_price_nominal.assign(T, 0.0);
  s.srm_up_price_dev.assign(T, 0.0);
  s.srm_down_price_dev.assign(T, 0.0);
  Portfolio p;
  NdrsUnit w = reference::wind();
  w.forecast_upper = {10, 12, 8, 15, 9, 11};
  w.forecast_deviation = {2, 3, 1, 4, 2, 3};
  p.ndrs.push_back(w);
  FdUnit fd;
  fd.name = "fd";
  fd.profiles = {{4, 4, 16, 20, 4, 4}, {8, 8, 8, 8, 8, 8}};
  fd.p_min = 3.0;
  fd.p_max = 22.0;
  fd.demand_upward_deviation.assign(T, 1.0);
  p.fd.push_back(fd);
  return {p, s};
}

void toy_runs(Evidence& ev, const milp::BackendFactory& be) {
  auto [p, s] = toy6();
  // Criterion 4: Gamma_DA = 2 against all C(6,2) subsets.
  BudgetSet b;
  b.gamma_dam = 2;
  auto m = build_robust_rvpp(p, s, b);
  auto sol = milp::solve(m, be);
  auto d = extract_rvpp_schedule(m, sol, p, s);
  const auto& x = d.schedule.p_da;
  std::vector<double> loss(6);
  for (int t = 0; t < 6; ++t)
    loss[t] = x[t] >= 0.0 ? s.dam_price_down_dev[t] * x[t]
                          : s.dam_price_up_dev[t] * -x[t];
  double brute = INFINITY;
  int bi = -1, bj = -1, ties = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      double v = d.schedule.nominal_profit - (loss[i] + loss[j]);
      if (v < brute - kBruteTol) {
        brute = v, bi = i, bj = j, ties = 0;
      } else if (std::fabs(v - brute) <= kBruteTol) {
        ++ties;
      }
    }
  auto wc = oracle::worst_case_profit(d.schedule, p, s, b,
                                      oracle::SubsetSearch::exhaustive);
  const auto* dam = wc.realization.find("dam");
  bool same_subset = ties > 0 || (dam && dam->periods == std::vector<int>{bi, bj});
  ev.brute_ok = std::fabs(wc.profit - brute) <= kBruteTol && same_subset &&
                rel_diff(sol.objective_value, brute) <= kObjTol;
  ev.brute_note = fmt("brute %.6f", brute) + fmt(", oracle %.6f", wc.profit) +
                  fmt(", model %.6f", sol.objective_value);
  note_rvpp(ev, d, p, s, b);

  // Criterion 5: exhaustive audit of robust toys.
  for (int g = 1; g <= 6; ++g) {
    BudgetSet bg;
    bg.gamma_dam = 2;
    bg.gamma_per_unit = {{"wind", g}, {"fd", std::min(g, 3)}};
    auto mg = build_robust_rvpp(p, s, bg);
    auto dg = extract_rvpp_schedule(mg, milp::solve(mg, be), p, s);
    auto audit = oracle::audit_robust_feasibility(dg.schedule, p, s, bg,
                                                  {oracle::kExhaustiveCap, kAuditTol, false});
    ++ev.audit_schedules;
    if (audit.exhaustive) ++ev.audit_exhaustive_toys;
    if (!audit.ok()) {
      ev.audit_violations += static_cast<int>(audit.violations.size());
      ev.audit_note = "toy Gamma=" + std::to_string(g);
    }
    auto gap = aggregation_gap(p, s, bg, be);
    note_gap(ev, gap);
  }

  // Counterexample: a deterministic schedule sells the full forecast and
  // breaks the wind cap under the pessimistic budgets.
  const int T = 24;
  MarketScenario cs;
  cs.grid.period_count = T;
  cs.season = Season::winter;
  cs.dam_price_median.assign(T, 50.0);
  for (auto* v : {&cs.dam_price_down_dev, &cs.dam_price_up_dev,
                  &cs.srm_up_price_nominal, &cs.srm_down_price_nominal,
                  &cs.srm_up_price_dev, &cs.srm_down_price_dev})
    v->assign(T, 0.0);
  Portfolio cp;
  NdrsUnit w = reference::wind();
  w.forecast_upper.assign(T, 10.0);
  w.forecast_deviation.assign(T, 8.0);
  cp.ndrs.push_back(w);
  auto cm = build_deterministic_rvpp(cp, cs);
  auto cd = extract_rvpp_schedule(cm, milp::solve(cm, be), cp, cs);
  auto ca = oracle::audit_robust_feasibility(
      cd.schedule, cp, cs, strategy_budgets(Strategy::pessimistic, cp));
  ev.counterexample_caught = !ca.ok();

  // Criterion 7: two-period arbitrage against the closed form.
  MarketScenario two;
  two.grid.period_count = 2;
  two.dam_price_median = {0.0, 100.0};
  for (auto* v : {&two.dam_price_down_dev, &two.dam_price_up_dev,
                  &two.srm_up_price_nominal, &two.srm_down_price_nominal,
                  &two.srm_up_price_dev, &two.srm_down_price_dev})
    v->assign(2, 0.0);
  const EsUnit e = reference::es_module();
  double stored = std::min({e.charge_p_max * e.charge_eff, e.e_max - e.e_min,
                            e.discharge_p_max / e.discharge_eff});
  double closed = (100.0 - e.op_cost) * stored * e.discharge_eff -
                  0.0 * stored / e.charge_eff;
  auto me = build_deterministic_es({e, 1}, two);
  auto se = milp::solve(me, be);
  auto es = extract_es_schedule(me, se, {e, 1}, two);
  note_es(ev, es, {e, 1}, two, {});
  ev.arbitrage_err = std::fabs(se.objective_value - closed);
}

bool same_files(const fs::path& a, const fs::path& b, std::string& why) {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  for (const char* f : {kResultsFile, kEnergyFile, kReservesFile, kSocFile,
                        kUnitProfitsFile}) {
    if (!fs::exists(a / f) || slurp(a / f) != slurp(b / f)) {
      why = (a / f).string();
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  auto t_all = Clock::now();
  const auto set = load_scenario(kScenario);
  const auto be = backend_factory(default_backend_name());
  Evidence ev;
  std::map<std::string, double> gap_at_100;

  std::fprintf(stderr, "ladder runs...\n");
  ladder_runs(ev, set, be);
  std::fprintf(stderr, "toys...\n");
  toy_runs(ev, be);
  std::fprintf(stderr, "sizing runs...\n");
  sizing_runs(ev, set, be, gap_at_100);
  std::fprintf(stderr, "FD scale runs...\n");
  fd_scale_runs(ev, set, be, gap_at_100);

  // Criteria 10 and 9: full sweep through the run layer, then repeat.
  std::fprintf(stderr, "full sweep...\n");
  const fs::path root = fs::temp_directory_path() / "rvpp_acceptance";
  fs::remove_all(root);
  auto t_sweep = Clock::now();
  int sweep_failures = 0;
  std::size_t sweep_cells = 0;
  for (int k = 1; k <= 4; ++k) {
    run::RunConfig c;
    c.case_id = k;
    c.scenario = kScenario;
    c.out = root / "a" / ("case" + std::to_string(k));
    auto rep = run::run(c);
    sweep_failures += rep.failures;
    sweep_cells += rep.cells.size();
  }
  const double sweep_seconds = since(t_sweep);
  std::fprintf(stderr, "repeat...\n");
  bool identical = true;
  std::string diff;
  for (int k : {1, 2, 4}) {
    run::RunConfig c;
    c.case_id = k;
    c.scenario = kScenario;
    c.out = root / "b" / ("case" + std::to_string(k));
    run::run(c);
    identical = identical && same_files(root / "a" / ("case" + std::to_string(k)),
                                        c.out, diff);
  }

  std::vector<std::pair<std::string, Outcome>> lines;
  auto add = [&](const std::string& name, bool pass, std::string detail) {
    lines.push_back({name, {pass, std::move(detail)}});
  };
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < 3; ++i) s += (i ? "; " : "") + v[i];
    return s.empty() ? s : " [" + s + "]";
  };

  add("1 zero-budget equivalence",
      ev.zero_budget_rvpp <= kObjTol && ev.zero_budget_es <= kObjTol &&
          ev.max_solve_seconds < kSolveLimit,
      std::to_string(ev.zero_budget_pairs) + " RVPP + " +
          std::to_string(ev.zero_budget_pairs) + " ES pairs, max rel diff " +
          fmt("%.2e", std::max(ev.zero_budget_rvpp, ev.zero_budget_es)) +
          " (tol 1e-6), slowest solve " + fmt("%.2f s", ev.max_solve_seconds) +
          " (limit 60 s)");
  add("2 budget monotonicity", ev.mono_violations == 0,
      std::to_string(ev.mono_checks) + " comparisons, " +
          std::to_string(ev.mono_violations) + " violations" +
          join(ev.mono_notes));
  add("3 superadditivity", ev.super_violations == 0,
      std::to_string(ev.super_checks) + " portfolios, " +
          std::to_string(ev.super_violations) +
          " below sum of individual profits - 1e-6, smallest gap " +
          fmt("%.6g EUR", ev.min_gap));
  add("4 duality tightness", ev.dual_worst <= kObjTol && ev.brute_ok,
      std::to_string(ev.dual_checks) + " robust solves, max rel |worst case - objective| " +
          fmt("%.2e", ev.dual_worst) + " (tol 1e-6); T=6 Gamma=2 " +
          ev.brute_note);
  add("5 robust feasibility audit",
      ev.audit_violations == 0 && ev.audit_exhaustive_toys == 6 &&
          ev.counterexample_caught,
      std::to_string(ev.audit_schedules) + " schedules, " +
          std::to_string(ev.audit_violations) + " violations > 1e-9" +
          (ev.audit_note.empty() ? "" : " [" + ev.audit_note + "]") + ", " +
          std::to_string(ev.audit_exhaustive_toys) +
          "/6 toys enumerated exhaustively, counterexample " +
          (ev.counterexample_caught ? "caught" : "MISSED"));
  add("6 sizing minimality and monotonicity",
      ev.sizing_nonminimal == 0 && ev.sizing_nonmonotone == 0,
      std::to_string(ev.sizing_runs) + " sizings, " +
          std::to_string(ev.sizing_nonminimal) + " not minimal, " +
          std::to_string(ev.sizing_nonmonotone) + " ladder decreases" +
          join(ev.sizing_notes));
  add("7 storage physics", ev.es_bad == 0 && ev.arbitrage_err <= kArbitrageTol,
      std::to_string(ev.es_schedules) + " schedules, " +
          std::to_string(ev.es_bad) + " with violations" +
          (ev.es_note.empty() ? "" : " [" + ev.es_note + "]") +
          ", worst |e_first - e_last| " + fmt("%.2e", ev.soc_cycle_worst) +
          ", two-period arbitrage error " + fmt("%.2e", ev.arbitrage_err) +
          " (tol 1e-6)");
  add("8 FD scale trend", ev.fd_bad == 0,
      std::to_string(ev.fd_cells) + " season/regime/strategy cells, " +
          std::to_string(ev.fd_bad) +
          " not rising with negative second differences" + join(ev.fd_notes));
  add("9 determinism", identical,
      identical ? "cases 1, 2, 4 rerun byte-identical" : "differs: " + diff);
  add("10 full sweep time", sweep_failures == 0 && sweep_seconds < kSweepLimit,
      std::to_string(sweep_cells) + " cells, " + std::to_string(sweep_failures) +
          " failed, " + fmt("%.1f s", sweep_seconds) + " (limit 1800 s, " +
          std::to_string(std::max(1, omp_get_num_procs())) + " cpu)");

  int failed = 0;
  for (const auto& [name, o] : lines) {
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed in %.0f s\n",
              static_cast<int>(lines.size()) - failed, lines.size(),
              since(t_all));
  return failed ? 1 : 0;
}
