#pragma once

// Deterministic and robust market models for a fleet of identical storage
// modules, treated as one scaled unit.

#include <optional>
#include <string>
#include <vector>

#include "rvpp/domain.hpp"
#include "rvpp/milp.hpp"
#include "rvpp/rvpp_model.hpp"

namespace rvpp {

struct EsFleet {
  EsUnit module;
  int module_count = 1;

  /// Powers and energies times module_count; efficiencies and cost as is.
  EsUnit scaled() const;
};

/// Empty when valid.
std::vector<std::string> validate_es_fleet(const EsFleet& fleet);

struct EsModelOptions {
  /// The SOC floor margin uses the down-reserve share, like the head margin.
  /// false puts the up-reserve share on the floor instead.
  bool symmetric_sigma_margins = true;
};

milp::Model build_deterministic_es(const EsFleet& fleet,
                                   const MarketScenario& s,
                                   const EsModelOptions& opts = {});

/// Price uncertainty only. Throws std::invalid_argument if any per-unit
/// budget is nonzero.
milp::Model build_robust_es(const EsFleet& fleet, const MarketScenario& s,
                            const BudgetSet& b,
                            const EsModelOptions& opts = {});

struct EsPriceDuals {
  PriceDual dam, sr_up, sr_dn;
  double penalty() const {
    return dam.penalty() + sr_up.penalty() + sr_dn.penalty();
  }
};

struct EsSchedule {
  PeriodGrid grid;
  std::vector<double> p_ch, p_dis, p_net;  // MW; p_net = p_dis - p_ch
  std::vector<double> r_up_ch, r_dn_ch, r_up_dis, r_dn_dis;
  std::vector<double> r_up, r_dn;
  std::vector<int> charging;  // 1 = charging mode
  /// Level before the first period followed by the level after each period
  /// (T+1 points; first equals last).
  std::vector<double> soc;
  double sigma_up = 0.0, sigma_dn = 0.0;
  double objective = 0.0;
  double nominal_profit = 0.0;
  std::optional<EsPriceDuals> robust;
};

/// Throws DecodeError on a non-optimal status, a missing variable, a mode
/// clash, or an SOC / objective mismatch.
EsSchedule extract_es_schedule(const milp::Model& m, const milp::Solution& sol,
                               const EsFleet& fleet, const MarketScenario& s);

double es_nominal_profit(const EsSchedule& sched, const EsFleet& fleet,
                         const MarketScenario& s);

/// Physics check of a schedule: bounds per mode, exclusivity, SOC recursion
/// and cycle, reserve-energy envelopes, SOC margins. One message per broken
/// rule, tolerance `tol`.
std::vector<std::string> es_violations(const EsSchedule& sched,
                                       const EsFleet& fleet,
                                       const EsModelOptions& opts = {},
                                       double tol = milp::kFeasibilityTol);

}  // namespace rvpp
