// Command-line entry point: runs one case study over a sweep of seasons,
// regimes, strategies and configurations.
//
// Exit codes: 0 all cells ok, 1 some cell failed (results of the others are
// still written), 2 bad configuration.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rvpp/backends.hpp"
#include "rvpp/run.hpp"

using namespace rvpp;

int main(int argc, char** argv) {
  run::RunConfig c;
  std::vector<std::string> seasons, regimes;
  std::string robustness = std::string(to_string(c.generation_robustness));
  bool linear = false;
  bool quiet = false;

  CLI::App app{"Robust RVPP scheduling and storage sizing case runner"};
  app.option_defaults()->delimiter(',');
  app.add_option("--case", c.case_id, "Case study 1-4")
      ->required()
      ->check(CLI::Range(1, 4));
  app.add_option("--scenario", c.scenario, "Scenario YAML file")->required();
  app.add_option("--out", c.out, "Output directory")->required();
  app.add_option("--season", seasons, "Season(s); default: all in the file");
  app.add_option("--regime", regimes, "favorable and/or unfavorable");
  app.add_option("--strategy", c.strategies,
                 "deterministic, optimistic, balanced, pessimistic");
  app.add_option("--config", c.configurations,
                 "full or without_<technology> (cases 3, 4)");
  app.add_option("--fd-scale", c.fd_scales,
                 "Flexible demand scale in percent (cases 3, 4)");
  app.add_option("--backend", c.backend,
                 "Solver backend (" + [] {
                   std::string s;
                   for (const auto& n : backend_names()) s += (s.empty() ? "" : ", ") + n;
                   return s;
                 }() + "); default: $RVPP_BACKEND or highs");
  app.add_option("--max-modules", c.max_modules, "Storage sizing cap")
      ->capture_default_str();
  app.add_flag("--linear-search", linear,
               "Size storage by +1 steps from one module");
  app.add_flag("--literal-3c", c.literal_3c,
               "Daily energy cap sums p*dt + r_up without dt on r_up");
  app.add_flag("--symmetric-sigma-margins,!--asymmetric-sigma-margins",
               c.symmetric_sigma_margins,
               "Storage SOC floor margin uses the down-reserve share")
      ->capture_default_str();
  app.add_option("--generation-robustness", robustness,
                 "per_period or selected_periods")
      ->capture_default_str();
  app.add_option("--objective-tol", c.objective_tol,
                 "Relative tolerance of the worst-case / objective check")
      ->capture_default_str();
  app.add_option("--audit-tol", c.audit_tol, "Robust audit tolerance")
      ->capture_default_str();
  app.add_option("--jobs", c.jobs, "Cells solved concurrently")
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "No per-cell progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : run::kExitConfigError;
  }

  try {
    for (const auto& s : seasons) c.seasons.push_back(parse_season(s));
    for (const auto& r : regimes) c.regimes.push_back(parse_regime(r));
    c.generation_robustness = parse_generation_robustness(robustness);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run::kExitConfigError;
  }
  c.accelerate = !linear;

  auto progress = [&](const run::CellOutcome& o) {
    if (quiet) return;
    const auto& k = o.cell.key;
    std::fprintf(stderr, "case %d %s %s %s %s: %s (%.2f s)%s%s\n", k.case_id,
                 k.season.c_str(), k.regime.c_str(), k.strategy.c_str(),
                 k.configuration.c_str(), o.row ? "ok" : "FAILED", o.seconds,
                 o.row ? "" : " ", o.error.c_str());
  };

  try {
    auto report = run::run(c, progress);
    std::fprintf(stderr, "%zu cells, %d failed; results in %s\n",
                 report.cells.size(), report.failures, c.out.string().c_str());
    return report.exit_code();
  } catch (const run::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return run::kExitRunFailure;
  }
}
