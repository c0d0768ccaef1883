#pragma once

// YAML scenario files: unit parameters, the storage module, and one sample
// day of prices and forecast series per season. The field layout is
// documented in schema/scenario.schema.json.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvpp/domain.hpp"

namespace rvpp {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parse or validation failure. The message starts with "file:line: " when
/// the position is known.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a scenario file holds. Per season, `portfolios` carries the
/// favorable-regime series and `markets` the regime tables; `at` selects a
/// regime through apply_regime.
struct ScenarioSet {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  PeriodGrid grid;
  EsUnit es_module;
  std::map<Season, Portfolio> portfolios;
  std::map<Season, MarketScenario> markets;

  std::vector<Season> seasons() const;
  /// Throws std::invalid_argument for a season the file does not define.
  std::pair<Portfolio, MarketScenario> at(Season season, Regime regime) const;

  friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;
};

ScenarioSet load_scenario(const std::filesystem::path& path);
/// `origin` names the source in error messages.
ScenarioSet parse_scenario(const std::string& text,
                           const std::string& origin = "<string>");

/// Fully explicit form (no `reference` shortcuts). Numbers use the shortest
/// text that reads back to the same double, so parse(emit(x)) == x.
std::string emit_scenario(const ScenarioSet& set);
void write_scenario(const ScenarioSet& set, const std::filesystem::path& path);

}  // namespace rvpp
