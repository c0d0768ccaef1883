#include "rvpp/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rvpp {

std::string format_number(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("non-finite value in results");
  if (std::fabs(x) < 1e-9) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

namespace {

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string key_cells(const RowKey& k) {
  return std::to_string(k.case_id) + "," + cell(k.season) + "," +
         cell(k.regime) + "," + cell(k.strategy) + "," +
         cell(k.configuration);
}

constexpr const char* kKeyHeader = "case,season,regime,strategy,configuration";

std::string opt(const std::optional<double>& v) {
  return v ? format_number(*v) : "";
}

void save(const std::filesystem::path& path, const std::string& text,
          std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << text;
  out.close();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
  written.push_back(path);
}

}  // namespace

std::vector<std::filesystem::path> write_results(
    const ResultsTable& table, const std::filesystem::path& dir) {
  if (table.rows.empty())
    throw std::invalid_argument("results table is empty; nothing to write");

  // Format everything first so a bad value leaves no partial files behind.
  std::ostringstream res, energy, reserves, soc, profits;
  res << kKeyHeader
      << ",objective_eur,nominal_profit_eur,traded_energy_mwh,reserve_up_mw,"
         "reserve_down_mw,sum_individual_eur,aggregation_gap_eur,es_modules,"
         "es_objective_eur,status\n";
  energy << kKeyHeader << ",entity,period,power_mw\n";
  reserves << kKeyHeader << ",entity,period,up_mw,down_mw\n";
  soc << kKeyHeader << ",entity,period,energy_mwh\n";
  profits << kKeyHeader << ",unit,individual_profit_eur\n";

  for (const auto& r : table.rows) {
    const std::string key = key_cells(r.key);
    res << key << "," << format_number(r.objective) << ","
        << format_number(r.nominal_profit) << ","
        << format_number(r.traded_energy) << "," << format_number(r.reserve_up)
        << "," << format_number(r.reserve_down) << "," << opt(r.sum_individual)
        << "," << opt(r.aggregation_gap) << ","
        << (r.es_modules ? std::to_string(*r.es_modules) : "") << ","
        << opt(r.es_objective) << "," << cell(r.status) << "\n";
    for (const auto& s : r.energy)
      for (std::size_t t = 0; t < s.values.size(); ++t)
        energy << key << "," << cell(s.entity) << "," << t << ","
               << format_number(s.values[t]) << "\n";
    if (r.up.size() != r.down.size())
      throw std::invalid_argument("reserve series up/down count differs");
    for (std::size_t i = 0; i < r.up.size(); ++i) {
      const auto& u = r.up[i];
      const auto& d = r.down[i];
      if (u.entity != d.entity || u.values.size() != d.values.size())
        throw std::invalid_argument("reserve series '" + u.entity +
                                    "' up/down mismatch");
      for (std::size_t t = 0; t < u.values.size(); ++t)
        reserves << key << "," << cell(u.entity) << "," << t << ","
                 << format_number(u.values[t]) << ","
                 << format_number(d.values[t]) << "\n";
    }
    for (const auto& s : r.soc)
      for (std::size_t t = 0; t < s.values.size(); ++t)
        soc << key << "," << cell(s.entity) << "," << t << ","
            << format_number(s.values[t]) << "\n";
    for (const auto& [unit, v] : r.unit_profits)
      profits << key << "," << cell(unit) << "," << format_number(v) << "\n";
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error(dir.string() + ": cannot create output directory" +
                             (ec ? " (" + ec.message() + ")" : ""));
  std::vector<std::filesystem::path> written;
  save(dir / kResultsFile, res.str(), written);
  save(dir / kEnergyFile, energy.str(), written);
  save(dir / kReservesFile, reserves.str(), written);
  save(dir / kSocFile, soc.str(), written);
  save(dir / kUnitProfitsFile, profits.str(), written);
  return written;
}

}  // namespace rvpp
