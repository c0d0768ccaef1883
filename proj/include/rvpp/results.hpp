#pragma once

// Flat CSV outputs of a run: one summary row per completed cell plus long-form
// plot data (traded energy, reserves, state of charge per period) and the
// per-unit stand-alone profits.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rvpp {

struct RowKey {
  int case_id = 0;
  std::string season;
  std::string regime;
  std::string strategy;
  std::string configuration;

  friend bool operator==(const RowKey&, const RowKey&) = default;
  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

/// One named per-period series (e.g. a unit's dispatch, or "rvpp" for the
/// market position).
struct PeriodSeries {
  std::string entity;
  std::vector<double> values;

  friend bool operator==(const PeriodSeries&, const PeriodSeries&) = default;
};

struct ResultRow {
  RowKey key;
  double objective = 0.0;       // EUR, robust objective of the scheduled entity
  double nominal_profit = 0.0;  // EUR, same schedule at nominal prices
  double traded_energy = 0.0;   // MWh, sum of the DAM position
  double reserve_up = 0.0;      // MW summed over periods
  double reserve_down = 0.0;
  // Aggregation and sizing columns; empty cells when not computed.
  std::optional<double> sum_individual;
  std::optional<double> aggregation_gap;
  std::optional<int> es_modules;
  std::optional<double> es_objective;
  std::string status = "ok";

  std::vector<PeriodSeries> energy;  // MW per period
  std::vector<PeriodSeries> up;      // MW per period
  std::vector<PeriodSeries> down;
  std::vector<PeriodSeries> soc;     // MWh, period 0 is the start of day
  std::map<std::string, double> unit_profits;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
};

inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kEnergyFile = "traded_energy.csv";
inline constexpr const char* kReservesFile = "reserves.csv";
inline constexpr const char* kSocFile = "soc.csv";
inline constexpr const char* kUnitProfitsFile = "unit_profits.csv";

/// Writes the five CSV files into `dir` (created if needed) and returns their
/// paths. Numbers use 6 significant digits. Throws std::invalid_argument for
/// an empty table or a non-finite number, std::runtime_error if a file
/// cannot be written.
std::vector<std::filesystem::path> write_results(
    const ResultsTable& table, const std::filesystem::path& dir);

/// `%.6g`, with values below 1e-9 in magnitude printed as 0.
std::string format_number(double x);

}  // namespace rvpp
