#pragma once

// Case orchestration: expands a run configuration into sweep cells, solves
// each cell, gates every schedule through the oracle, and writes results.
//
// Case 1: robust RVPP schedule per season (unit dispatch and reserves).
// Case 2: the same schedule over a regime x strategy sweep.
// Case 3: aggregation gap per configuration / FD scale, with storage sizing.
// Case 4: schedule and SOC of the storage fleet sized to each gap.

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvpp/domain.hpp"
#include "rvpp/milp.hpp"
#include "rvpp/results.hpp"
#include "rvpp/rvpp_model.hpp"
#include "rvpp/scenario_io.hpp"

namespace rvpp::run {

inline constexpr const char* kDeterministic = "deterministic";
inline constexpr const char* kFull = "full";
inline constexpr const char* kManifestFile = "manifest.json";

inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Bad configuration, unreadable scenario or unknown backend (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int case_id = 0;
  // Empty lists take the case defaults (see expand_cells).
  std::vector<Season> seasons;
  std::vector<Regime> regimes;
  std::vector<std::string> strategies;      // "deterministic" or a ladder name
  std::vector<std::string> configurations;  // "full" or "without_<technology>"
  std::vector<double> fd_scales;            // percent of the file's FD
  std::filesystem::path scenario;
  std::string backend;  // empty: default_backend_name()
  std::filesystem::path out;
  int max_modules = 1000;
  bool accelerate = true;  // see SizingOptions; false is the +1 search
  bool literal_3c = false;
  bool symmetric_sigma_margins = true;
  GenerationRobustness generation_robustness = GenerationRobustness::per_period;
  double objective_tol = 1e-6;  // relative to max(1, |objective|)
  double audit_tol = 1e-9;
  int jobs = 1;
};

/// One message per problem; empty means the configuration can run.
std::vector<std::string> validate_config(const RunConfig& c);

struct Cell {
  RowKey key;
  Season season = Season::winter;
  Regime regime = Regime::favorable;
  std::string strategy;
  std::string configuration;
  double fd_scale = 100.0;
};

/// Cartesian product of the sweep lists in a fixed order (season, regime,
/// strategy, configuration, FD scale). Case 3 without explicit configuration
/// or FD-scale lists runs the ablation rows (every "without_" present in the
/// portfolio) plus the FD scales 0/50/100/150 of the full portfolio.
std::vector<Cell> expand_cells(const RunConfig& c, const ScenarioSet& set);

struct CellOutcome {
  Cell cell;
  std::optional<ResultRow> row;  // set iff the cell succeeded
  std::string error;
  double seconds = 0.0;
  // Gate evidence for the manifest.
  std::uint64_t audit_realizations = 0;
  bool audit_exhaustive = true;
  double replay_worst = 0.0;
  int sizing_iterations = 0;
};

/// Solves and audits one cell. Never throws; failures land in `error`.
CellOutcome run_cell(const Cell& cell, const ScenarioSet& set,
                     const RunConfig& c, const milp::BackendFactory& backend);

struct RunReport {
  std::vector<CellOutcome> cells;
  ResultsTable table;
  std::vector<std::filesystem::path> files;
  int failures = 0;
  int exit_code() const { return failures ? kExitRunFailure : kExitOk; }
};

/// Runs every cell (up to `jobs` at once), then writes the results and the
/// manifest into `c.out`. Throws ConfigError before any solve if the
/// configuration, scenario or backend is unusable. `progress` sees each cell
/// as it finishes, one call at a time.
RunReport run(const RunConfig& c,
              const std::function<void(const CellOutcome&)>& progress = {});

}  // namespace rvpp::run
