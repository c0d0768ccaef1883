#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "rvpp/milp.hpp"

namespace rvpp::milp {

namespace {

SolveStatus run_backend(const Model& model, const BackendFactory& factory,
                        std::unique_ptr<SolverBackend>& backend) {
  backend = factory();
  if (!backend) throw BackendError("backend factory returned nothing");
  backend->load(model);
  backend->optimize();
  return backend->status();
}

// A copy of `model` with the objective zeroed, used to tell an infeasible
// model from an unbounded one.
Model feasibility_copy(const Model& model) {
  Model copy(model.name() + "_feasibility");
  for (const auto& v : model.variables())
    copy.add_variable(v.name, v.kind, v.lower, v.upper);
  for (const auto& c : model.constraints())
    copy.add_constraint(c.name, c.expr, c.sense, c.rhs);
  copy.set_objective(Direction::minimize, LinearExpr{});
  return copy;
}

}  // namespace

Solution solve(const Model& model, const BackendFactory& factory,
               const SolveOptions& options) {
  auto start = std::chrono::steady_clock::now();
  std::unique_ptr<SolverBackend> backend;
  Solution sol;
  sol.status = run_backend(model, factory, backend);

  if (sol.status == SolveStatus::unbounded && options.disambiguate) {
    // Some backends report "unbounded" before proving primal feasibility.
    std::unique_ptr<SolverBackend> probe;
    if (run_backend(feasibility_copy(model), factory, probe) ==
        SolveStatus::infeasible)
      sol.status = SolveStatus::infeasible;
  }

  if (sol.status == SolveStatus::optimal) {
    sol.values = backend->values();
    if (sol.values.size() != model.variables().size())
      throw BackendError(backend->name() + " returned " +
                         std::to_string(sol.values.size()) +
                         " values for " +
                         std::to_string(model.variables().size()) +
                         " variables");
    for (const auto& v : model.variables()) {
      double& x = sol.values[v.id.index];
      if (!std::isfinite(x) || x < v.lower - kFeasibilityTol ||
          x > v.upper + kFeasibilityTol)
        throw BackendError(backend->name() + ": value " + format_number(x) +
                           " of '" + v.name + "' violates its bounds");
      x = std::clamp(x, v.lower, v.upper);
      if (v.kind == VarKind::binary) x = std::round(x);
    }
    double reported = backend->objective();
    double recomputed = model.solver_objective().evaluate(sol.values);
    if (!close_rel(reported, recomputed, kOptimalityRelTol))
      throw BackendError(backend->name() + ": reported objective " +
                         format_number(reported) +
                         " disagrees with recomputed " +
                         format_number(recomputed));
    sol.objective_value = model.objective().evaluate(sol.values);
  }

  sol.solve_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return sol;
}

std::optional<InfeasibilityReport> diagnose_infeasibility(
    const Model& model, const BackendFactory& factory) {
  Model elastic(model.name() + "_elastic");
  for (const auto& v : model.variables())
    elastic.add_variable(v.name, v.kind, v.lower, v.upper);

  LinearExpr total;
  struct Slack {
    int row;
    VarId plus, minus;
  };
  std::vector<Slack> slacks;
  for (std::size_t i = 0; i < model.constraints().size(); ++i) {
    const auto& c = model.constraints()[i];
    LinearExpr e = c.expr;
    Slack s{static_cast<int>(i), {}, {}};
    std::string tag = "elastic#" + std::to_string(i);
    if (c.sense != Sense::le) {
      s.plus = elastic.add_continuous(tag + "#up");
      e.add(s.plus, 1.0);
      total.add(s.plus, 1.0);
    }
    if (c.sense != Sense::ge) {
      s.minus = elastic.add_continuous(tag + "#down");
      e.add(s.minus, -1.0);
      total.add(s.minus, 1.0);
    }
    elastic.add_constraint(c.name, std::move(e), c.sense, c.rhs);
    slacks.push_back(s);
  }
  elastic.set_objective(Direction::minimize, total);

  Solution sol;
  try {
    sol = solve(elastic, factory, {.disambiguate = false});
  } catch (const BackendError&) {
    return std::nullopt;
  }
  if (!sol.optimal()) return std::nullopt;

  InfeasibilityReport report;
  std::map<std::string, double> by_family;
  for (const auto& s : slacks) {
    double amount = 0.0;
    if (s.plus.valid()) amount += sol.value(s.plus);
    if (s.minus.valid()) amount += sol.value(s.minus);
    if (amount <= kFeasibilityTol) continue;
    const std::string& name = model.constraints()[s.row].name;
    std::string family = name.substr(0, name.find('('));
    by_family[family] += amount;
    if (amount > report.slack) {
      report.slack = amount;
      report.constraint = name;
    }
  }
  if (by_family.empty()) return std::nullopt;
  report.family_slack.assign(by_family.begin(), by_family.end());
  std::stable_sort(report.family_slack.begin(), report.family_slack.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  report.family = report.family_slack.front().first;
  return report;
}

}  // namespace rvpp::milp
