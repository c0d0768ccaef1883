#pragma once

// Physical and market data for a renewable virtual power plant (RVPP) and a
// grid-scale storage fleet trading in a day-ahead energy market (DAM) and a
// secondary reserve market (SRM).
//
// Units: power in MW, energy in MWh, DAM prices in EUR/MWh, reserve prices in
// EUR/MW per period. Deviations are non-negative magnitudes; the model builders
// decide the direction in which each one hurts.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rvpp {

enum class Season { winter, spring, summer, autumn };
enum class Regime { favorable, unfavorable };
enum class Strategy { optimistic, balanced, pessimistic };

enum class Technology {
  hydro,
  biomass,
  wind,
  solar_pv,
  csp,
  flexible_demand,
  other,
};

std::string_view to_string(Season season);
std::string_view to_string(Regime regime);
std::string_view to_string(Strategy strategy);
std::string_view to_string(Technology technology);

// Parsers throw std::invalid_argument naming the offending text.
Season parse_season(std::string_view text);
Regime parse_regime(std::string_view text);
Strategy parse_strategy(std::string_view text);
Technology parse_technology(std::string_view text);

inline constexpr Season kAllSeasons[] = {Season::winter, Season::spring,
                                         Season::summer, Season::autumn};
inline constexpr Regime kAllRegimes[] = {Regime::favorable,
                                         Regime::unfavorable};
inline constexpr Strategy kStrategyLadder[] = {
    Strategy::optimistic, Strategy::balanced, Strategy::pessimistic};

struct PeriodGrid {
  int period_count = 24;
  double delta_t = 1.0;  // hours

  friend bool operator==(const PeriodGrid&, const PeriodGrid&) = default;
};

/// Commitment state before the first period. `periods_remaining` is the
/// residual minimum up (if online) or down (if offline) obligation.
struct InitialCommitment {
  bool online = false;
  int periods_remaining = 0;

  friend bool operator==(const InitialCommitment&,
                         const InitialCommitment&) = default;
};

/// Dispatchable renewable source (hydro, biomass).
struct DrsUnit {
  std::string name;
  Technology technology = Technology::other;
  double p_max = 0.0;
  double p_min = 0.0;
  double op_cost = 0.0;        // EUR/MWh
  double startup_cost = 0.0;   // EUR
  double shutdown_cost = 0.0;  // EUR
  int min_up = 0;
  int min_down = 0;
  double daily_energy_limit = 0.0;  // MWh
  InitialCommitment initial;

  friend bool operator==(const DrsUnit&, const DrsUnit&) = default;
};

/// Non-dispatchable renewable source (wind farm, solar PV).
struct NdrsUnit {
  std::string name;
  Technology technology = Technology::other;
  double p_min = 0.0;
  double op_cost = 0.0;
  std::vector<double> forecast_upper;      // deterministic forecast, MW
  std::vector<double> forecast_deviation;  // downward deviation, MW

  friend bool operator==(const NdrsUnit&, const NdrsUnit&) = default;
};

struct ThermalStoreParams {
  double e_max = 0.0;  // MWh-thermal
  double e_min = 0.0;
  double charge_p_max = 0.0;  // MW-thermal
  double discharge_p_max = 0.0;
  double charge_eff = 1.0;
  double discharge_eff = 1.0;

  friend bool operator==(const ThermalStoreParams&,
                         const ThermalStoreParams&) = default;
};

/// Concentrated solar power plant: solar field, turbine and thermal store.
struct CspUnit {
  std::string name;
  std::vector<double> sf_thermal_upper;      // MW-thermal
  std::vector<double> sf_thermal_deviation;  // MW-thermal, downward
  double turbine_p_max = 0.0;                // MW-electric
  double turbine_p_min = 0.0;
  double efficiency = 1.0;         // thermal to electric
  double startup_loss_mult = 0.0;  // p.u. of turbine_p_max, thermal
  int min_up = 0;
  int min_down = 0;
  double op_cost = 0.0;
  ThermalStoreParams ts;
  InitialCommitment initial;

  friend bool operator==(const CspUnit&, const CspUnit&) = default;
};

/// Flexible demand with a menu of daily baseline profiles.
struct FdUnit {
  std::string name;
  std::vector<std::vector<double>> profiles;  // [profile][period], MW
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<double> demand_upward_deviation;
  double flexibility_margin = 0.10;

  friend bool operator==(const FdUnit&, const FdUnit&) = default;
};

/// One storage module; fleets scale it (see EsFleet).
struct EsUnit {
  double charge_p_max = 0.0;
  double charge_p_min = 0.0;
  double discharge_p_max = 0.0;
  double discharge_p_min = 0.0;
  double e_max = 0.0;
  double e_min = 0.0;
  double charge_eff = 1.0;
  double discharge_eff = 1.0;
  double op_cost = 0.0;  // EUR/MWh discharged

  friend bool operator==(const EsUnit&, const EsUnit&) = default;
};

template <class T>
struct RegimePair {
  T favorable{};
  T unfavorable{};

  const T& operator[](Regime r) const {
    return r == Regime::favorable ? favorable : unfavorable;
  }
  T& operator[](Regime r) {
    return r == Regime::favorable ? favorable : unfavorable;
  }

  friend bool operator==(const RegimePair&, const RegimePair&) = default;
};

using SeasonalLimits = std::map<Season, RegimePair<double>>;

/// One sample day of market data plus the regime tables that apply_regime
/// draws from.
struct MarketScenario {
  PeriodGrid grid;
  std::vector<double> dam_price_median;
  std::vector<double> dam_price_down_dev;
  std::vector<double> dam_price_up_dev;
  std::vector<double> srm_up_price_nominal;
  std::vector<double> srm_down_price_nominal;
  std::vector<double> srm_up_price_dev;
  std::vector<double> srm_down_price_dev;
  std::optional<Season> season;
  Regime regime = Regime::favorable;

  // unit name -> season -> daily energy limit per regime
  std::map<std::string, SeasonalLimits> seasonal_energy_limits;
  // unit name -> deviation series per regime (NDRS, CSP solar field, FD)
  std::map<std::string, RegimePair<std::vector<double>>> regime_deviations;

  int periods() const { return grid.period_count; }

  friend bool operator==(const MarketScenario&,
                         const MarketScenario&) = default;
};

struct BudgetSet {
  int gamma_dam = 0;
  int gamma_sr_up = 0;
  int gamma_sr_down = 0;
  std::map<std::string, int> gamma_per_unit;

  int unit(std::string_view name) const;
  bool all_zero() const;

  friend bool operator==(const BudgetSet&, const BudgetSet&) = default;
};

struct Portfolio {
  std::vector<DrsUnit> drs;
  std::vector<NdrsUnit> ndrs;
  std::vector<CspUnit> csp;
  std::vector<FdUnit> fd;

  bool empty() const {
    return drs.empty() && ndrs.empty() && csp.empty() && fd.empty();
  }
  std::size_t size() const {
    return drs.size() + ndrs.size() + csp.size() + fd.size();
  }
  std::vector<std::string> unit_names() const;
  bool contains(std::string_view name) const;

  friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

/// Returns one message per broken invariant; empty means valid.
std::vector<std::string> validate_portfolio(const Portfolio& portfolio,
                                            const MarketScenario& scenario);

std::vector<std::string> validate_budgets(const BudgetSet& budgets,
                                          int period_count);

std::vector<std::string> validate_es_unit(const EsUnit& unit);

/// Table of uncertainty budgets per operator strategy, mapped onto the
/// portfolio by technology class. Every unit of a class receives the class
/// budget.
BudgetSet strategy_budgets(Strategy strategy, const Portfolio& portfolio);
BudgetSet strategy_budgets(std::string_view strategy,
                           const Portfolio& portfolio);

/// Sets the seasonal energy limits and swaps every deviation series to the
/// given regime. Nothing else changes. Throws std::invalid_argument when the
/// scenario has no season tag or the regime table lacks that season.
std::pair<Portfolio, MarketScenario> apply_regime(Portfolio portfolio,
                                                  MarketScenario scenario,
                                                  Regime regime);

/// Portfolio holding only the named unit (copied from `portfolio`).
Portfolio singleton_portfolio(const Portfolio& portfolio,
                              std::string_view unit_name);

/// Drops every unit of the given technology.
Portfolio without_technology(const Portfolio& portfolio,
                             Technology technology);

/// Scales every flexible demand (profiles, bounds, deviations) by `factor`.
/// A factor of zero removes the demands.
Portfolio scale_flexible_demand(const Portfolio& portfolio, double factor);

}  // namespace rvpp
