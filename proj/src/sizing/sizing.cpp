#include "rvpp/sizing.hpp"

#include <cmath>
#include <exception>
#include <vector>

namespace rvpp {

namespace {

milp::Solution checked(const milp::Model& m,
                       const milp::BackendFactory& backend,
                       const std::string& what) {
  auto sol = milp::solve(m, backend);
  if (!sol.optimal())
    throw SolveFailure(what + ": solver status " +
                       std::string(milp::to_string(sol.status)));
  return sol;
}

}  // namespace

double individual_profit(const Portfolio& p, std::string_view unit,
                         const MarketScenario& s, const BudgetSet& b,
                         const milp::BackendFactory& backend,
                         const RvppModelOptions& opts) {
  Portfolio one = singleton_portfolio(p, unit);
  if (one.empty())
    throw std::invalid_argument("portfolio has no unit '" + std::string(unit) +
                                "'");
  auto m = build_robust_rvpp(one, s, b, milp::kDefaultBigM, opts);
  return checked(m, backend, "unit " + std::string(unit)).objective_value;
}

std::map<std::string, double> individual_profits(
    const Portfolio& p, const MarketScenario& s, const BudgetSet& b,
    const milp::BackendFactory& backend, const RvppModelOptions& opts) {
  const auto names = p.unit_names();
  const int n = static_cast<int>(names.size());
  std::vector<double> value(n);
  std::vector<std::exception_ptr> error(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      value[i] = individual_profit(p, names[i], s, b, backend, opts);
    } catch (...) {
      error[i] = std::current_exception();
    }
  }
  std::map<std::string, double> out;
  for (int i = 0; i < n; ++i) {
    if (error[i]) std::rethrow_exception(error[i]);
    out[names[i]] = value[i];
  }
  return out;
}

AggregationGap aggregation_gap(RvppDecoded rvpp, double rvpp_profit,
                               std::map<std::string, double> individual) {
  AggregationGap g;
  g.rvpp = std::move(rvpp);
  g.rvpp_profit = rvpp_profit;
  g.individual = std::move(individual);
  for (const auto& [_, v] : g.individual) g.sum_individual += v;
  g.gap = g.rvpp_profit - g.sum_individual;
  return g;
}

AggregationGap aggregation_gap(const Portfolio& p, const MarketScenario& s,
                               const BudgetSet& b,
                               const milp::BackendFactory& backend,
                               const RvppModelOptions& opts) {
  auto m = build_robust_rvpp(p, s, b, milp::kDefaultBigM, opts);
  auto sol = checked(m, backend, "portfolio");
  auto decoded = extract_rvpp_schedule(m, sol, p, s, opts);
  return aggregation_gap(std::move(decoded), sol.objective_value,
                         individual_profits(p, s, b, backend, opts));
}

BudgetSet price_budgets(const BudgetSet& b) {
  BudgetSet out = b;
  out.gamma_per_unit.clear();
  return out;
}

std::string_view to_string(SizingStatus s) {
  return s == SizingStatus::matched ? "matched" : "not_matchable_at_cap";
}

milp::Model build_es_with_floor(const EsUnit& module, int count,
                                const MarketScenario& s, const BudgetSet& b,
                                double floor, const EsModelOptions& opts) {
  auto m = build_robust_es({module, count}, s, price_budgets(b), opts);
  m.add_constraint("profit_floor", m.objective(), milp::Sense::ge, floor);
  return m;
}

std::optional<EsSchedule> es_floor_solve(const EsUnit& module, int count,
                                         const MarketScenario& s,
                                         const BudgetSet& b, double floor,
                                         const milp::BackendFactory& backend,
                                         const EsModelOptions& opts) {
  auto m = build_es_with_floor(module, count, s, b, floor, opts);
  auto sol = milp::solve(m, backend);
  if (sol.status == milp::SolveStatus::infeasible) return std::nullopt;
  if (!sol.optimal())
    throw SolveFailure("storage fleet of " + std::to_string(count) +
                       " modules: solver status " +
                       std::string(milp::to_string(sol.status)));
  return extract_es_schedule(m, sol, {module, count}, s);
}

SizingResult size_es_to_match(double gap, const EsUnit& module,
                              const MarketScenario& s, const BudgetSet& b,
                              const milp::BackendFactory& backend,
                              const SizingOptions& opts) {
  if (!std::isfinite(gap))
    throw std::invalid_argument("profit gap must be finite");
  if (opts.max_modules < 1)
    throw std::invalid_argument("max_modules must be >= 1");
  SizingResult r;
  r.lower_bound_profit = gap;
  auto probe = [&](int n) {
    ++r.iterations;
    return es_floor_solve(module, n, s, b, gap, backend, opts.es);
  };
  auto accept = [&](int n, EsSchedule sc) {
    r.status = SizingStatus::matched;
    r.module_count = n;
    r.fleet_e_max = module.e_max * n;
    r.es_objective = sc.objective;
    r.schedule = std::move(sc);
  };
  r.status = SizingStatus::not_matchable_at_cap;

  if (!opts.accelerate) {
    for (int n = 1; n <= opts.max_modules; ++n)
      if (auto sc = probe(n)) {
        accept(n, std::move(*sc));
        return r;
      }
    return r;
  }

  // Storage profit is positively homogeneous in the module count (every
  // bound scales, the mode binaries do not), so one unconstrained solve at a
  // single module predicts the answer. The floor solves below decide.
  int start = 1;
  {
    auto m = build_robust_es({module, 1}, s, price_budgets(b), opts.es);
    ++r.iterations;
    auto sol = milp::solve(m, backend);
    if (sol.optimal() && sol.objective_value > 0.0 && gap > 0.0) {
      double guess = std::ceil(gap / sol.objective_value);
      if (guess <= opts.max_modules) start = std::max(1, static_cast<int>(guess));
    }
  }

  // Largest known infeasible count and smallest known feasible count.
  int bad = 0, good = -1;
  std::optional<EsSchedule> good_sched;
  for (int n = start;; n = std::min(2 * n, opts.max_modules)) {
    if (auto sc = probe(n)) {
      good = n;
      good_sched = std::move(sc);
      break;
    }
    bad = n;
    if (n == opts.max_modules) return r;
  }
  // Confirm the prediction from just below before bisecting.
  if (good - bad > 1) {
    if (auto sc = probe(good - 1)) {
      good = good - 1;
      good_sched = std::move(sc);
    } else {
      bad = good - 1;
    }
  }
  while (good - bad > 1) {
    int mid = bad + (good - bad) / 2;
    if (auto sc = probe(mid)) {
      good = mid;
      good_sched = std::move(sc);
    } else {
      bad = mid;
    }
  }
  // Here bad == good - 1 and was solved infeasible (or good == 1).
  accept(good, std::move(*good_sched));
  return r;
}

SizingResult size_for_portfolio(const Portfolio& p, const EsUnit& module,
                                const MarketScenario& s, const BudgetSet& b,
                                const milp::BackendFactory& backend,
                                const SizingOptions& opts,
                                const RvppModelOptions& rvpp_opts) {
  auto g = aggregation_gap(p, s, b, backend, rvpp_opts);
  SizingResult r = size_es_to_match(g.gap, module, s, b, backend, opts);
  r.individual = g.individual;
  r.rvpp_profit = g.rvpp_profit;
  return r;
}

}  // namespace rvpp
