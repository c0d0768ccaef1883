#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "rvpp/milp.hpp"

namespace rvpp::milp {

bool close_rel(double a, double b, double tol) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

std::string_view to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::eq: return "=";
    case Sense::ge: return ">=";
  }
  return "?";
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
  }
  return "?";
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  terms_.reserve(terms_.size() + o.terms_.size());
  for (const auto& t : o.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= o.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double k) {
  for (auto& t : terms_) t.coef *= k;
  constant_ *= k;
  return *this;
}

void LinearExpr::normalize() {
  std::unordered_map<int, std::size_t> slot;
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    auto [it, fresh] = slot.try_emplace(t.var.index, merged.size());
    if (fresh)
      merged.push_back(t);
    else
      merged[it->second].coef += t.coef;
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
  double sum = constant_;
  for (const auto& t : terms_) sum += t.coef * values.at(t.var.index);
  return sum;
}

std::string lp_name_problem(std::string_view name) {
  if (name.empty()) return "empty name";
  if (name.size() > 255) return "longer than 255 characters";
  unsigned char first = static_cast<unsigned char>(name[0]);
  if (!(std::isalpha(first) || first == '_'))
    return "must start with a letter or '_'";
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(c));
    return out;
  };
  std::string l = lower(name);
  if (l.rfind("inf", 0) == 0 || l.rfind("nan", 0) == 0)
    return "must not start with 'inf' or 'nan'";
  static constexpr std::array<std::string_view, 24> kKeywords = {
      "max",     "maximize", "maximum", "maximise", "min",     "minimize",
      "minimum", "minimise", "subject", "such",     "st",      "s.t.",
      "bounds",  "bound",    "binary",  "binaries", "bin",     "general",
      "generals", "gen",     "semi",    "semis",    "end",     "free"};
  for (auto k : kKeywords)
    if (l == k) return "is an LP section keyword";
  for (char c : name) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '_' || c == '.' || c == '(' || c == ')' ||
        c == ',' || c == '~' || c == '#')
      continue;
    return std::string("contains '") + c + "'";
  }
  return {};
}

VarId Model::add_variable(std::string name, VarKind kind, double lower,
                          double upper) {
  if (auto why = lp_name_problem(name); !why.empty())
    throw ModelError("variable '" + name + "': " + why);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw ModelError("variable '" + name + "': bounds [" +
                     format_number(lower) + ", " + format_number(upper) +
                     "] are inverted");
  if (lower == kInf || upper == -kInf)
    throw ModelError("variable '" + name + "': empty bound range");
  if (kind == VarKind::binary && (lower < 0.0 || upper > 1.0))
    throw ModelError("binary variable '" + name +
                     "': bounds must lie within [0, 1]");
  int index = static_cast<int>(variables_.size());
  if (!by_name_.emplace(name, index).second)
    throw ModelError("duplicate variable name '" + name + "'");
  variables_.push_back({VarId{index}, std::move(name), kind, lower, upper});
  return VarId{index};
}

void Model::check_expr(const LinearExpr& e, std::string_view context) const {
  for (const auto& t : e.terms()) {
    if (t.var.index < 0 ||
        t.var.index >= static_cast<int>(variables_.size()))
      throw ModelError(std::string(context) + ": unknown variable id " +
                       std::to_string(t.var.index));
    if (!std::isfinite(t.coef))
      throw ModelError(std::string(context) + ": non-finite coefficient on '" +
                       variables_[t.var.index].name + "'");
  }
  if (!std::isfinite(e.constant()))
    throw ModelError(std::string(context) + ": non-finite constant");
}

int Model::add_constraint(std::string name, LinearExpr expr, Sense sense,
                          double rhs) {
  if (auto why = lp_name_problem(name); !why.empty())
    throw ModelError("constraint '" + name + "': " + why);
  check_expr(expr, "constraint '" + name + "'");
  rhs -= expr.constant();
  if (!std::isfinite(rhs))
    throw ModelError("constraint '" + name + "': non-finite rhs");
  expr.set_constant(0.0);
  expr.normalize();
  int index = static_cast<int>(constraints_.size());
  constraint_by_name_.try_emplace(name, index);
  constraints_.push_back({std::move(name), std::move(expr), sense, rhs});
  return index;
}

void Model::set_objective(Direction dir, LinearExpr objective) {
  check_expr(objective, "objective");
  objective.normalize();
  direction_ = dir;
  objective_ = std::move(objective);
}

void Model::set_tie_break(LinearExpr tie_break) {
  check_expr(tie_break, "tie-break");
  tie_break.normalize();
  tie_break_ = std::move(tie_break);
}

LinearExpr Model::solver_objective() const {
  LinearExpr e = objective_;
  e += tie_break_;
  e.normalize();
  return e;
}

const Variable& Model::variable(VarId id) const {
  return variables_.at(id.index);
}

std::optional<VarId> Model::find_variable(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return VarId{it->second};
}

VarId Model::require_variable(std::string_view name) const {
  if (auto id = find_variable(name)) return *id;
  throw ModelError("model '" + name_ + "' has no variable '" +
                   std::string(name) + "'");
}

std::optional<int> Model::find_constraint(std::string_view name) const {
  auto it = constraint_by_name_.find(std::string(name));
  if (it == constraint_by_name_.end()) return std::nullopt;
  return it->second;
}

void Model::set_big_m(double m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw ModelError("big-M must be positive and finite");
  big_m_ = m;
}

std::size_t Model::binary_count() const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(),
                    [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::string format_number(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void write_terms(std::string& out, const Model& m, const LinearExpr& e,
                 bool leading_constant) {
  constexpr int kTermsPerLine = 8;
  int on_line = 0;
  bool first = true;
  for (const auto& t : e.terms()) {
    if (on_line == kTermsPerLine) {
      out += "\n   ";
      on_line = 0;
    }
    double c = t.coef;
    if (first)
      out += c < 0 ? " - " : " ";
    else
      out += c < 0 ? " - " : " + ";
    out += format_number(std::fabs(c));
    out += ' ';
    out += m.variables()[t.var.index].name;
    first = false;
    ++on_line;
  }
  if (leading_constant) {
    double c = e.constant();
    if (first)
      out += ' ' + format_number(c);
    else if (c != 0.0)
      out += (c < 0 ? " - " : " + ") + format_number(std::fabs(c));
  }
}

}  // namespace

std::string export_lp_text(const Model& m) {
  std::string out;
  out += "\\ ";
  out += m.name();
  out += '\n';
  out += m.direction() == Direction::maximize ? "Maximize\n" : "Minimize\n";
  out += " obj:";
  write_terms(out, m, m.solver_objective(), true);
  out += "\nSubject To\n";

  std::unordered_map<std::string, int> used;
  for (const auto& c : m.constraints()) {
    if (c.expr.empty() && m.variables().empty()) continue;
    int& n = used[c.name];
    std::string label = c.name;
    if (n > 0) label += "~" + std::to_string(n);
    ++n;
    out += ' ';
    out += label;
    out += ':';
    if (c.expr.empty()) {
      out += " 0 ";
      out += m.variables().front().name;
    } else {
      write_terms(out, m, c.expr, false);
    }
    out += ' ';
    out += to_string(c.sense);
    out += ' ';
    out += format_number(c.rhs);
    out += '\n';
  }

  // Every variable is listed so readers create all columns even when a
  // variable appears in no row.
  out += "Bounds\n";
  for (const auto& v : m.variables()) {
    out += ' ';
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) {
      out += "0 <= " + v.name + " <= 1\n";
    } else if (v.lower == -kInf && v.upper == kInf) {
      out += v.name + " free\n";
    } else if (v.upper == kInf) {
      out += v.name + " >= " + format_number(v.lower) + '\n';
    } else {
      out += format_number(v.lower) + " <= " + v.name +
             " <= " + format_number(v.upper) + '\n';
    }
  }

  bool any_binary = false;
  for (const auto& v : m.variables()) {
    if (v.kind != VarKind::binary) continue;
    if (!any_binary) out += "Binaries\n";
    any_binary = true;
    out += ' ' + v.name + '\n';
  }
  out += "End\n";
  return out;
}

double max_violation(const Model& m, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& v : m.variables()) {
    double val = x.at(v.id.index);
    worst = std::max({worst, v.lower - val, val - v.upper});
  }
  for (const auto& c : m.constraints()) {
    double lhs = c.expr.evaluate(x);
    switch (c.sense) {
      case Sense::le: worst = std::max(worst, lhs - c.rhs); break;
      case Sense::ge: worst = std::max(worst, c.rhs - lhs); break;
      case Sense::eq: worst = std::max(worst, std::fabs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

}  // namespace rvpp::milp
