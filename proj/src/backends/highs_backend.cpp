#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <unordered_map>

#include "Highs.h"
#include "rvpp/backends.hpp"

namespace rvpp {

namespace {

using milp::BackendError;
using milp::SolveStatus;

void configure(Highs& h, const HighsSettings& s) {
  h.setOptionValue("output_flag", false);
  h.setOptionValue("threads", 1);
  h.setOptionValue("random_seed", 0);
  h.setOptionValue("mip_rel_gap", s.mip_rel_gap);
  h.setOptionValue("mip_abs_gap", s.mip_abs_gap);
  h.setOptionValue("mip_feasibility_tolerance", 1e-7);
  h.setOptionValue("primal_feasibility_tolerance", 1e-8);
  h.setOptionValue("dual_feasibility_tolerance", 1e-8);
  h.setOptionValue("time_limit", s.time_limit);
  h.setOptionValue("allow_unbounded_or_infeasible", false);
}

SolveStatus map_status(HighsModelStatus st, const std::string& who) {
  switch (st) {
    case HighsModelStatus::kOptimal:
    case HighsModelStatus::kModelEmpty:
      return SolveStatus::optimal;
    case HighsModelStatus::kInfeasible:
      return SolveStatus::infeasible;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
      return SolveStatus::unbounded;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kObjectiveBound:
    case HighsModelStatus::kObjectiveTarget:
    case HighsModelStatus::kInterrupt:
    case HighsModelStatus::kMemoryLimit:
      return SolveStatus::limit;
    default:
      break;
  }
  throw BackendError(who + ": solver failed with model status " +
                     std::to_string(static_cast<int>(st)));
}

class HighsBase : public milp::SolverBackend {
 public:
  explicit HighsBase(const HighsSettings& s) { configure(highs_, s); }

  void optimize() override {
    if (!loaded_) throw BackendError(name() + ": optimize before load");
    HighsStatus rs = highs_.run();
    if (rs == HighsStatus::kError)
      throw BackendError(name() + ": run() returned an error");
    status_ = map_status(highs_.getModelStatus(), name());
  }

  SolveStatus status() const override { return status_; }

  double objective() const override {
    if (num_vars_ == 0) return offset_;
    return highs_.getInfo().objective_function_value;
  }

 protected:
  Highs highs_;
  bool loaded_ = false;
  int num_vars_ = 0;
  double offset_ = 0.0;
  SolveStatus status_ = SolveStatus::limit;
};

class StructuralBackend final : public HighsBase {
 public:
  using HighsBase::HighsBase;
  std::string name() const override { return "highs"; }

  void load(const milp::Model& m) override {
    HighsLp lp;
    const int n = static_cast<int>(m.variables().size());
    const int rows = static_cast<int>(m.constraints().size());
    lp.num_col_ = n;
    lp.num_row_ = rows;
    lp.sense_ = m.direction() == milp::Direction::maximize
                    ? ObjSense::kMaximize
                    : ObjSense::kMinimize;
    milp::LinearExpr obj = m.solver_objective();
    lp.offset_ = obj.constant();
    lp.col_cost_.assign(n, 0.0);
    for (const auto& t : obj.terms()) lp.col_cost_[t.var.index] += t.coef;

    bool integer = false;
    lp.integrality_.assign(n, HighsVarType::kContinuous);
    for (const auto& v : m.variables()) {
      lp.col_lower_.push_back(v.lower);
      lp.col_upper_.push_back(v.upper);
      if (v.kind == milp::VarKind::binary) {
        lp.integrality_[v.id.index] = HighsVarType::kInteger;
        integer = true;
      }
    }
    if (!integer) lp.integrality_.clear();

    // Column-wise matrix.
    std::vector<int> count(n, 0);
    for (const auto& c : m.constraints())
      for (const auto& t : c.expr.terms()) ++count[t.var.index];
    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kColwise;
    a.num_col_ = n;
    a.num_row_ = rows;
    a.start_.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) a.start_[j + 1] = a.start_[j] + count[j];
    a.index_.resize(a.start_[n]);
    a.value_.resize(a.start_[n]);
    std::vector<int> fill(a.start_.begin(), a.start_.end() - 1);
    for (int i = 0; i < rows; ++i) {
      const auto& c = m.constraints()[i];
      for (const auto& t : c.expr.terms()) {
        int k = fill[t.var.index]++;
        a.index_[k] = i;
        a.value_[k] = t.coef;
      }
      double lo = -kHighsInf, hi = kHighsInf;
      if (c.sense != milp::Sense::le) lo = c.rhs;
      if (c.sense != milp::Sense::ge) hi = c.rhs;
      lp.row_lower_.push_back(lo);
      lp.row_upper_.push_back(hi);
    }

    if (highs_.passModel(std::move(lp)) == HighsStatus::kError)
      throw BackendError("highs: passModel rejected the model");
    loaded_ = true;
    num_vars_ = n;
    offset_ = obj.constant();
  }

  std::vector<double> values() const override {
    if (num_vars_ == 0) return {};
    return highs_.getSolution().col_value;
  }
};

class LpTextBackend final : public HighsBase {
 public:
  using HighsBase::HighsBase;
  std::string name() const override { return "highs-lp"; }

  void load(const milp::Model& m) override {
    static std::atomic<unsigned long> counter{0};
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() /
                    ("rvpp-" + std::to_string(::getpid()) + "-" +
                     std::to_string(counter++) + ".lp");
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw BackendError("highs-lp: cannot write " + path.string());
      out << milp::export_lp_text(m);
      if (!out) throw BackendError("highs-lp: cannot write " + path.string());
    }
    HighsStatus rs = highs_.readModel(path.string());
    std::error_code ec;
    fs::remove(path, ec);
    if (rs == HighsStatus::kError)
      throw BackendError("highs-lp: reader rejected the exported model");

    num_vars_ = static_cast<int>(m.variables().size());
    offset_ = m.solver_objective().constant();
    const HighsLp& lp = highs_.getLp();
    if (num_vars_ == 0) {
      loaded_ = true;
      return;
    }
    if (lp.num_col_ != num_vars_)
      throw BackendError("highs-lp: reader produced " +
                         std::to_string(lp.num_col_) + " columns for " +
                         std::to_string(num_vars_) + " variables");
    std::unordered_map<std::string, int> col;
    for (int j = 0; j < lp.num_col_; ++j) col.emplace(lp.col_names_[j], j);
    column_of_.assign(num_vars_, -1);
    for (const auto& v : m.variables()) {
      auto it = col.find(v.name);
      if (it == col.end())
        throw BackendError("highs-lp: column '" + v.name + "' missing");
      column_of_[v.id.index] = it->second;
    }
    loaded_ = true;
  }

  std::vector<double> values() const override {
    const auto& x = highs_.getSolution().col_value;
    std::vector<double> out(column_of_.size());
    for (std::size_t i = 0; i < column_of_.size(); ++i)
      out[i] = x.at(column_of_[i]);
    return out;
  }

 private:
  std::vector<int> column_of_;
};

}  // namespace

std::unique_ptr<milp::SolverBackend> make_highs_backend(
    const HighsSettings& s) {
  return std::make_unique<StructuralBackend>(s);
}

std::unique_ptr<milp::SolverBackend> make_highs_lp_backend(
    const HighsSettings& s) {
  return std::make_unique<LpTextBackend>(s);
}

std::vector<std::string> backend_names() { return {"highs", "highs-lp"}; }

milp::BackendFactory backend_factory(std::string_view name,
                                     const HighsSettings& s) {
  if (name == "highs") return [s] { return make_highs_backend(s); };
  if (name == "highs-lp") return [s] { return make_highs_lp_backend(s); };
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (known: highs, highs-lp)");
}

std::string default_backend_name() {
  const char* env = std::getenv("RVPP_BACKEND");
  if (env && *env) return env;
  return "highs";
}

}  // namespace rvpp
