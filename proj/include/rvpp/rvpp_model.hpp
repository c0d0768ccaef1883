#pragma once

// Deterministic and robust RVPP market models and their schedules.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvpp/domain.hpp"
#include "rvpp/milp.hpp"

namespace rvpp {

/// How generation (NDRS, CSP solar field) and demand (FD) deviations enter
/// the robust model.
enum class GenerationRobustness {
  /// Every row is protected against its own worst case: whenever a unit's
  /// budget is at least 1, each period's bound moves by the full deviation.
  per_period,
  /// Selection binaries q(u,t) with sum_t q = budget pick the periods whose
  /// bound moves, chosen by the maximizing operator through big-M linking.
  selected_periods,
};

std::string_view to_string(GenerationRobustness g);
GenerationRobustness parse_generation_robustness(std::string_view text);

struct RvppModelOptions {
  /// Daily energy cap sums p*dt + r_up (unit-mixed form) instead of
  /// p*dt + r_up*dt.
  bool literal_3c = false;
  GenerationRobustness generation_robustness = GenerationRobustness::per_period;
  /// Objective penalty per profile index step on FD profile binaries, so the
  /// lowest index wins ties. Removed from reported objectives.
  double tie_break_epsilon = 1e-5;
};

/// Throws std::invalid_argument listing every validation problem.
milp::Model build_deterministic_rvpp(const Portfolio& p,
                                     const MarketScenario& s,
                                     const RvppModelOptions& opts = {});

milp::Model build_robust_rvpp(const Portfolio& p, const MarketScenario& s,
                              const BudgetSet& b,
                              double big_m = milp::kDefaultBigM,
                              const RvppModelOptions& opts = {});

enum class UnitClass { drs, ndrs, csp, fd };

struct UnitSchedule {
  std::string name;
  UnitClass unit_class = UnitClass::drs;
  std::vector<double> p, r_up, r_dn;
  // Committed units only (DRS, CSP turbine); empty otherwise.
  std::vector<int> u, v_su, v_sd;
};

struct CspThermalSchedule {
  std::string name;
  std::vector<double> p_sf, ts_charge, ts_discharge;
  /// Start-of-day level followed by the level at the end of each period
  /// (T+1 points; first equals last).
  std::vector<double> ts_energy;
};

struct RvppSchedule {
  PeriodGrid grid;
  std::vector<double> p_da;  // MW, positive = sell
  std::vector<double> r_sr_up, r_sr_dn;
  std::vector<UnitSchedule> units;  // portfolio order: drs, ndrs, csp, fd
  std::vector<CspThermalSchedule> csp;
  std::vector<std::pair<std::string, int>> fd_profile;
  double objective = 0.0;       // reported model objective
  double nominal_profit = 0.0;  // objective before robust penalties

  const UnitSchedule* unit(std::string_view name) const;
};

struct PriceDual {
  int gamma = 0;
  double mu = 0.0;
  std::vector<double> xi;
  double penalty() const;  // gamma*mu + sum(xi)
};

struct UnitRobustness {
  std::string name;
  int gamma = 0;
  std::vector<double> deviation;  // magnitude per period
  std::vector<double> x;          // bound shift applied per period
  // selected_periods only
  std::optional<double> mu;
  std::vector<double> xi;
  std::vector<int> q;
};

struct RobustArtifacts {
  GenerationRobustness mode = GenerationRobustness::per_period;
  PriceDual dam, sr_up, sr_dn;
  std::vector<double> x_da;
  std::vector<UnitRobustness> units;
  double price_penalty() const;
};

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RvppDecoded {
  RvppSchedule schedule;
  std::optional<RobustArtifacts> robust;
};

/// Decodes every decision by name, re-checks the three balance equations
/// (kFeasibilityTol) and the objective against the solution
/// (kOptimalityRelTol). Throws DecodeError on a non-optimal solution or any
/// mismatch.
RvppDecoded extract_rvpp_schedule(const milp::Model& m,
                                  const milp::Solution& sol,
                                  const Portfolio& p, const MarketScenario& s,
                                  const RvppModelOptions& opts = {});

/// Deterministic objective of a schedule: DAM and reserve revenue at nominal
/// prices minus operating, startup and shutdown costs.
double rvpp_nominal_profit(const RvppSchedule& sched, const Portfolio& p,
                           const MarketScenario& s);

/// Largest residual of the three balance equations over all periods.
double rvpp_balance_residual(const RvppSchedule& sched, const Portfolio& p);

/// Deviation magnitudes of a unit's uncertain stream (NDRS forecast, CSP
/// solar field, FD demand). Empty for dispatchable units.
std::vector<double> unit_deviation(const Portfolio& p, std::string_view unit);

}  // namespace rvpp
