#pragma once

// Solver-free evaluation of fixed schedules: worst-case profit under the
// budgeted uncertainty sets, robust-feasibility audit by realization
// enumeration, and constraint replay.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvpp/domain.hpp"
#include "rvpp/es_model.hpp"
#include "rvpp/rvpp_model.hpp"

namespace rvpp::oracle {

// ---- subsets --------------------------------------------------------------

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// The k-subset of {0..n-1} with lexicographic rank `rank`, ascending.
std::vector<int> unrank_subset(int n, int k, std::uint64_t rank);

struct SubsetPick {
  double value = 0.0;        // sum of the picked losses, added in index order
  std::vector<int> periods;  // ascending
};

/// Top-`gamma` periods by loss; ties go to the earliest period.
SubsetPick greedy_top(const std::vector<double>& loss, int gamma);

/// Exhaustive search over all C(T, gamma) subsets. Among equal sums the
/// lexicographically smallest subset wins, which matches greedy_top.
SubsetPick exhaustive_top_serial(const std::vector<double>& loss, int gamma);
/// Same result as the serial kernel; the rank range is split across OpenMP
/// threads.
SubsetPick exhaustive_top_parallel(const std::vector<double>& loss, int gamma);

// ---- worst case -----------------------------------------------------------

struct StreamRealization {
  std::string stream;  // "dam", "sr_up", "sr_down" or a unit name
  int gamma = 0;
  std::vector<int> periods;     // periods pushed to their bound
  std::vector<double> induced;  // parameter vector under this realization
  double loss = 0.0;
};

struct Realization {
  std::vector<StreamRealization> streams;
  const StreamRealization* find(std::string_view stream) const;
};

struct WorstCase {
  double nominal = 0.0;
  double profit = 0.0;  // nominal minus the selected losses
  Realization realization;
};

enum class SubsetSearch { greedy, exhaustive };

/// Per-period DAM loss of a traded series: the price drop on sales, the
/// price rise on purchases (MW * dt * EUR/MWh).
std::vector<double> dam_losses(const std::vector<double>& sell,
                               const std::vector<double>& buy,
                               const MarketScenario& s);

/// Throws std::invalid_argument when a budget exceeds T.
WorstCase worst_case_profit(const RvppSchedule& sched, const Portfolio& p,
                            const MarketScenario& s, const BudgetSet& b,
                            SubsetSearch search = SubsetSearch::greedy);

WorstCase worst_case_profit(const EsSchedule& sched, const EsFleet& fleet,
                            const MarketScenario& s, const BudgetSet& b,
                            SubsetSearch search = SubsetSearch::greedy);

// ---- audit ----------------------------------------------------------------

inline constexpr std::uint64_t kExhaustiveCap = 20000;
inline constexpr double kAuditTol = 1e-9;

struct AuditViolation {
  std::string unit;
  std::string family;  // ndrs_max, sf_max, fd_profile, balance_up, ...
  int period = 0;
  double amount = 0.0;
  std::vector<int> realization;  // subset that exposes it (empty: any)
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  std::uint64_t realizations = 0;  // subsets examined, summed over streams
  bool exhaustive = true;          // false if any stream used the row rule
  bool ok() const { return violations.empty(); }
};

struct AuditOptions {
  std::uint64_t exhaustive_cap = kExhaustiveCap;
  double tol = kAuditTol;
  /// Skip enumeration and use the row rule everywhere.
  bool force_dominant = false;
};

/// Re-checks the uncertain rows (NDRS cap, solar-field cap, FD floor) under
/// every budget-feasible realization, plus the three balance equations.
/// Streams whose subset count exceeds the cap use the dominant realization
/// of each row: the row's own period is degraded whenever the budget is at
/// least 1, which is exactly the worst any subset can do to that row.
AuditReport audit_robust_feasibility(const RvppSchedule& sched,
                                     const Portfolio& p,
                                     const MarketScenario& s,
                                     const BudgetSet& b,
                                     const AuditOptions& opts = {});

// ---- replay ---------------------------------------------------------------

struct ReplayReport {
  /// Largest residual per constraint family (0 when satisfied).
  std::map<std::string, double> residual;
  /// Logic failures that have no magnitude (commitment rules, mode clash).
  std::vector<std::string> flags;

  double worst() const;
  bool ok(double tol = milp::kFeasibilityTol) const {
    return flags.empty() && worst() <= tol;
  }
};

ReplayReport replay_schedule(const RvppSchedule& sched, const Portfolio& p,
                             const MarketScenario& s,
                             const RvppModelOptions& opts = {});

ReplayReport replay_schedule(const EsSchedule& sched, const EsFleet& fleet,
                             const MarketScenario& s,
                             const EsModelOptions& opts = {});

}  // namespace rvpp::oracle
