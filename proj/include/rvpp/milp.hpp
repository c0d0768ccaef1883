#pragma once

// Solver-agnostic mixed-integer linear model, LP text export and the
// interface external solvers implement. No solver lives here.

#include <compare>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rvpp::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-6;    // absolute, MW-scale
inline constexpr double kOptimalityRelTol = 1e-5;  // relative objective
inline constexpr double kDefaultBigM = 1e5;

/// |a - b| <= tol * max(1, |a|, |b|)
bool close_rel(double a, double b, double tol);

struct VarId {
  int index = -1;
  bool valid() const { return index >= 0; }
  auto operator<=>(const VarId&) const = default;
};

enum class VarKind { continuous, binary };
enum class Sense { le, eq, ge };
enum class Direction { maximize, minimize };

std::string_view to_string(Sense sense);

struct Variable {
  VarId id;
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT
  LinearExpr(VarId v) { terms_.push_back({v, 1.0}); }   // NOLINT

  LinearExpr& add(VarId v, double coef) {
    terms_.push_back({v, coef});
    return *this;
  }
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(double k);

  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) {
    return a += b;
  }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) {
    return a -= b;
  }
  friend LinearExpr operator*(LinearExpr a, double k) { return a *= k; }
  friend LinearExpr operator*(double k, LinearExpr a) { return a *= k; }
  friend LinearExpr operator-(LinearExpr a) { return a *= -1.0; }

  /// Merges duplicate variables (first occurrence keeps its position) and
  /// drops exact zeros.
  void normalize();

  double evaluate(const std::vector<double>& values) const;

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

/// Stored as `expr sense rhs`, with any expression constant folded into rhs.
struct Constraint {
  std::string name;
  LinearExpr expr;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

class ModelError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Returns an empty string if `name` is usable as an LP identifier,
/// otherwise the reason it is not.
std::string lp_name_problem(std::string_view name);

class Model {
 public:
  explicit Model(std::string name = "model") : name_(std::move(name)) {}

  VarId add_variable(std::string name, VarKind kind, double lower,
                     double upper);
  VarId add_continuous(std::string name, double lower = 0.0,
                       double upper = kInf) {
    return add_variable(std::move(name), VarKind::continuous, lower, upper);
  }
  VarId add_binary(std::string name) {
    return add_variable(std::move(name), VarKind::binary, 0.0, 1.0);
  }

  int add_constraint(std::string name, LinearExpr expr, Sense sense,
                     double rhs);

  void set_objective(Direction dir, LinearExpr objective);
  /// Added to the objective handed to the solver, never reported.
  void set_tie_break(LinearExpr tie_break);

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(VarId id) const;
  std::optional<VarId> find_variable(std::string_view name) const;
  VarId require_variable(std::string_view name) const;
  std::optional<int> find_constraint(std::string_view name) const;

  Direction direction() const { return direction_; }
  const LinearExpr& objective() const { return objective_; }
  const LinearExpr& tie_break() const { return tie_break_; }
  /// objective + tie_break, normalized.
  LinearExpr solver_objective() const;

  double big_m() const { return big_m_; }
  void set_big_m(double m);

  /// Free-form numeric metadata that builders leave for decoders.
  void set_attribute(const std::string& key, double value) {
    attributes_[key] = value;
  }
  std::optional<double> attribute(const std::string& key) const {
    auto it = attributes_.find(key);
    if (it == attributes_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t binary_count() const;

 private:
  void check_expr(const LinearExpr& e, std::string_view context) const;

  std::string name_;
  std::vector<Variable> variables_;
  std::unordered_map<std::string, int> by_name_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> constraint_by_name_;
  Direction direction_ = Direction::maximize;
  LinearExpr objective_;
  LinearExpr tie_break_;
  double big_m_ = kDefaultBigM;
  std::map<std::string, double> attributes_;
};

/// CPLEX-style LP text. Variables and constraints keep insertion order and
/// numbers use the shortest round-trip form, so equal models give equal bytes.
std::string export_lp_text(const Model& model);

std::string format_number(double x);

enum class SolveStatus { optimal, infeasible, unbounded, limit };
std::string_view to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::limit;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values;  // indexed by VarId::index
  double solve_seconds = 0.0;

  double value(VarId id) const { return values.at(id.index); }
  bool optimal() const { return status == SolveStatus::optimal; }
};

/// Raised when a backend fails or returns something inconsistent. Never
/// converted into a solve status.
class BackendError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a solver adapter has to provide. One instance serves one solve; no
/// reentrancy is assumed. See docs/backend-contract.md.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual void load(const Model& model) = 0;
  virtual void optimize() = 0;
  virtual SolveStatus status() const = 0;
  /// Primal values indexed like Model::variables(). Only after `optimal`.
  virtual std::vector<double> values() const = 0;
  /// Objective of the loaded model including its constant.
  virtual double objective() const = 0;
};

using BackendFactory = std::function<std::unique_ptr<SolverBackend>()>;

struct SolveOptions {
  /// Distinguish infeasible from unbounded with a zero-objective re-solve
  /// when the backend cannot tell.
  bool disambiguate = true;
};

/// Solves `model` on a fresh backend. On `optimal` the values are checked
/// against their bounds (kFeasibilityTol), binaries are rounded, and the
/// backend's objective is compared with the recomputed one
/// (kOptimalityRelTol). `objective_value` excludes the tie-break term.
Solution solve(const Model& model, const BackendFactory& factory,
               const SolveOptions& options = {});

/// Largest violation of any constraint or bound at `values`.
double max_violation(const Model& model, const std::vector<double>& values);

struct InfeasibilityReport {
  std::string family;  // constraint name up to the first '('
  std::string constraint;
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> family_slack;  // descending
};

/// Elastic probe: every row gets penalized slack and the total is minimized.
/// The family carrying the most slack is reported. Returns nullopt if the
/// elastic model itself fails to solve.
std::optional<InfeasibilityReport> diagnose_infeasibility(
    const Model& model, const BackendFactory& factory);

}  // namespace rvpp::milp
