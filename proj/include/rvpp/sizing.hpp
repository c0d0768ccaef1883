#pragma once

// Individual-participation baselines, the aggregation gap of the RVPP over
// its units trading alone, and the smallest storage fleet whose robust
// profit reaches that gap.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "rvpp/es_model.hpp"
#include "rvpp/milp.hpp"
#include "rvpp/rvpp_model.hpp"

namespace rvpp {

struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Robust RVPP objective of the named unit trading alone. Throws
/// SolveFailure unless the solve is optimal.
double individual_profit(const Portfolio& p, std::string_view unit,
                         const MarketScenario& s, const BudgetSet& b,
                         const milp::BackendFactory& backend,
                         const RvppModelOptions& opts = {});

struct AggregationGap {
  double rvpp_profit = 0.0;
  double sum_individual = 0.0;
  double gap = 0.0;  // rvpp_profit - sum_individual
  std::map<std::string, double> individual;
  RvppDecoded rvpp;  // schedule behind rvpp_profit
};

/// Stand-alone profit of every unit, keyed by name. Singletons run on OpenMP
/// threads, each with its own backend instance.
std::map<std::string, double> individual_profits(
    const Portfolio& p, const MarketScenario& s, const BudgetSet& b,
    const milp::BackendFactory& backend, const RvppModelOptions& opts = {});

/// Assembles the gap from an already solved portfolio.
AggregationGap aggregation_gap(RvppDecoded rvpp, double rvpp_profit,
                               std::map<std::string, double> individual);

/// Solves the full portfolio and every singleton.
AggregationGap aggregation_gap(const Portfolio& p, const MarketScenario& s,
                               const BudgetSet& b,
                               const milp::BackendFactory& backend,
                               const RvppModelOptions& opts = {});

/// The price budgets of `b`; per-unit budgets dropped.
BudgetSet price_budgets(const BudgetSet& b);

enum class SizingStatus { matched, not_matchable_at_cap };
std::string_view to_string(SizingStatus s);

struct SizingResult {
  SizingStatus status = SizingStatus::matched;
  double lower_bound_profit = 0.0;
  int module_count = 0;  // 0 when not matchable
  double fleet_e_max = 0.0;
  double es_objective = 0.0;
  int iterations = 0;  // storage solves performed, prediction included
  std::map<std::string, double> individual;
  double rvpp_profit = 0.0;
  std::optional<EsSchedule> schedule;
};

struct SizingOptions {
  int max_modules = 1000;
  /// Start from the count predicted by one unconstrained single-module solve,
  /// then double / bisect instead of +1 steps. The answer is confirmed by
  /// solving at N (feasible) and N-1 (infeasible), so it equals the linear
  /// search whenever feasibility is monotone in N.
  bool accelerate = false;
  EsModelOptions es;
};

/// Robust storage model of `count` modules with `objective >= floor` added.
milp::Model build_es_with_floor(const EsUnit& module, int count,
                                const MarketScenario& s, const BudgetSet& b,
                                double floor, const EsModelOptions& opts = {});

/// Optimal solution at `count` modules, or nullopt if the floor cannot be
/// met. Other statuses throw SolveFailure.
std::optional<EsSchedule> es_floor_solve(const EsUnit& module, int count,
                                         const MarketScenario& s,
                                         const BudgetSet& b, double floor,
                                         const milp::BackendFactory& backend,
                                         const EsModelOptions& opts = {});

/// Smallest module count whose robust storage profit reaches `gap`, starting
/// from one module. Uses only the price budgets of `b`.
SizingResult size_es_to_match(double gap, const EsUnit& module,
                              const MarketScenario& s, const BudgetSet& b,
                              const milp::BackendFactory& backend,
                              const SizingOptions& opts = {});

/// aggregation_gap followed by size_es_to_match.
SizingResult size_for_portfolio(const Portfolio& p, const EsUnit& module,
                                const MarketScenario& s, const BudgetSet& b,
                                const milp::BackendFactory& backend,
                                const SizingOptions& opts = {},
                                const RvppModelOptions& rvpp_opts = {});

}  // namespace rvpp
