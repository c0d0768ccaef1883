#include "rvpp/rvpp_model.hpp"

#include <algorithm>

#include "rvpp/commitment.hpp"

namespace rvpp {

using milp::Direction;
using milp::LinearExpr;
using milp::Model;
using milp::Sense;
using milp::VarId;

std::string_view to_string(GenerationRobustness g) {
  return g == GenerationRobustness::per_period ? "per_period"
                                               : "selected_periods";
}

GenerationRobustness parse_generation_robustness(std::string_view text) {
  if (text == "per_period") return GenerationRobustness::per_period;
  if (text == "selected_periods")
    return GenerationRobustness::selected_periods;
  throw std::invalid_argument("unknown generation robustness '" +
                              std::string(text) + "'");
}

std::vector<double> unit_deviation(const Portfolio& p, std::string_view name) {
  for (const auto& u : p.ndrs)
    if (u.name == name) return u.forecast_deviation;
  for (const auto& u : p.csp)
    if (u.name == name) return u.sf_thermal_deviation;
  for (const auto& u : p.fd)
    if (u.name == name) return u.demand_upward_deviation;
  return {};
}

namespace {

std::string ix(int t) { return "(" + std::to_string(t) + ")"; }
std::string ix(const std::string& u, int t) {
  return "(" + u + "," + std::to_string(t) + ")";
}
std::string ix(const std::string& u) { return "(" + u + ")"; }

void require_valid(const Portfolio& p, const MarketScenario& s) {
  if (p.empty()) throw std::invalid_argument("empty portfolio");
  auto problems = validate_portfolio(p, s);
  if (problems.empty()) return;
  std::string msg = "invalid portfolio/scenario:";
  for (const auto& v : problems) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

class Builder {
 public:
  Builder(const Portfolio& p, const MarketScenario& s,
          const RvppModelOptions& o, const BudgetSet* budgets)
      : p_(p),
        s_(s),
        o_(o),
        b_(budgets),
        m_(budgets ? "robust_rvpp" : "deterministic_rvpp"),
        T_(s.grid.period_count),
        dt_(s.grid.delta_t) {
    gen_.resize(T_);
    gen_up_.resize(T_);
    gen_dn_.resize(T_);
    dem_.resize(T_);
    dem_up_.resize(T_);
    dem_dn_.resize(T_);
  }

  Model build(double big_m) {
    m_.set_big_m(big_m);
    m_.set_attribute("periods", T_);
    m_.set_attribute("delta_t", dt_);
    m_.set_attribute("literal_3c", o_.literal_3c ? 1 : 0);
    market();
    for (const auto& u : p_.drs) drs(u);
    for (const auto& u : p_.ndrs) ndrs(u);
    for (const auto& u : p_.csp) csp(u);
    for (const auto& u : p_.fd) fd(u);
    balance();
    if (b_) price_robustness();
    m_.set_objective(Direction::maximize, objective_);
    m_.set_tie_break(tie_break_);
    return std::move(m_);
  }

 private:
  int gamma(const std::string& unit) const { return b_ ? b_->unit(unit) : 0; }

  // Bound shift for an uncertain stream in each period: a constant under
  // per-period protection, a linked variable under selected periods.
  std::vector<LinearExpr> shift(const std::string& unit,
                                const std::vector<double>& dev) {
    std::vector<LinearExpr> out(T_);
    if (!b_) return out;
    const int g = gamma(unit);
    m_.set_attribute("gamma" + ix(unit), g);
    if (o_.generation_robustness == GenerationRobustness::per_period) {
      if (g >= 1)
        for (int t = 0; t < T_; ++t) out[t] = LinearExpr(dev[t]);
      return out;
    }
    const double M = m_.big_m();
    VarId mu = m_.add_continuous("mu" + ix(unit));
    LinearExpr card;
    for (int t = 0; t < T_; ++t) {
      VarId x = m_.add_continuous("x" + ix(unit, t));
      VarId xi = m_.add_continuous("xi" + ix(unit, t));
      VarId q = m_.add_binary("q" + ix(unit, t));
      m_.add_constraint("dev_on" + ix(unit, t),
                        LinearExpr(mu) + LinearExpr(xi) + M * LinearExpr(q) -
                            LinearExpr(x),
                        Sense::le, M);
      m_.add_constraint("dev_off" + ix(unit, t), LinearExpr(x) - M * LinearExpr(q),
                        Sense::le, 0.0);
      m_.add_constraint("dev_dual" + ix(unit, t), LinearExpr(mu) + LinearExpr(xi),
                        Sense::ge, dev[t]);
      card.add(q, 1.0);
      out[t] = LinearExpr(x);
    }
    m_.add_constraint("dev_card" + ix(unit), card, Sense::eq, g);
    return out;
  }

  void market() {
    for (int t = 0; t < T_; ++t) {
      p_da_.push_back(m_.add_continuous("p_da" + ix(t), -milp::kInf, milp::kInf));
      r_up_.push_back(m_.add_continuous("r_sr_up" + ix(t)));
      r_dn_.push_back(m_.add_continuous("r_sr_dn" + ix(t)));
      objective_.add(p_da_[t], s_.dam_price_median[t] * dt_);
      objective_.add(r_up_[t], s_.srm_up_price_nominal[t]);
      objective_.add(r_dn_[t], s_.srm_down_price_nominal[t]);
    }
  }

  struct Triplet {
    VarId p, up, dn;
  };

  Triplet unit_vars(const std::string& name, int t, double p_upper) {
    return {m_.add_continuous("p" + ix(name, t), 0.0, p_upper),
            m_.add_continuous("r_up" + ix(name, t)),
            m_.add_continuous("r_dn" + ix(name, t))};
  }

  void add_generation(int t, const Triplet& v) {
    gen_[t].add(v.p, 1.0);
    gen_up_[t].add(v.up, 1.0);
    gen_dn_[t].add(v.dn, 1.0);
  }

  void drs(const DrsUnit& u) {
    CommitmentVars c =
        add_commitment(m_, u.name, T_, u.min_up, u.min_down, u.initial);
    LinearExpr energy;
    for (int t = 0; t < T_; ++t) {
      Triplet v = unit_vars(u.name, t, u.p_max);
      add_generation(t, v);
      m_.add_constraint("drs_max" + ix(u.name, t),
                        LinearExpr(v.p) + LinearExpr(v.up) -
                            u.p_max * LinearExpr(c.u[t]),
                        Sense::le, 0.0);
      m_.add_constraint("drs_min" + ix(u.name, t),
                        LinearExpr(v.p) - LinearExpr(v.dn) -
                            u.p_min * LinearExpr(c.u[t]),
                        Sense::ge, 0.0);
      energy.add(v.p, dt_);
      energy.add(v.up, o_.literal_3c ? 1.0 : dt_);
      objective_.add(v.p, -u.op_cost * dt_);
      objective_.add(c.v_su[t], -u.startup_cost);
      objective_.add(c.v_sd[t], -u.shutdown_cost);
    }
    m_.add_constraint("drs_energy" + ix(u.name), energy, Sense::le,
                      u.daily_energy_limit);
  }

  void ndrs(const NdrsUnit& u) {
    auto x = shift(u.name, u.forecast_deviation);
    for (int t = 0; t < T_; ++t) {
      Triplet v = unit_vars(u.name, t, milp::kInf);
      add_generation(t, v);
      m_.add_constraint("ndrs_max" + ix(u.name, t),
                        LinearExpr(v.p) + LinearExpr(v.up) + x[t], Sense::le,
                        u.forecast_upper[t]);
      m_.add_constraint("ndrs_min" + ix(u.name, t),
                        LinearExpr(v.p) - LinearExpr(v.dn), Sense::ge, u.p_min);
      objective_.add(v.p, -u.op_cost * dt_);
    }
  }

  // Store dynamics: end-of-period level e(t), with the level before the
  // first period equal to the last one.
  std::vector<VarId> store(const std::string& name, const ThermalStoreParams& ts,
                           std::vector<VarId>& ch, std::vector<VarId>& dis) {
    std::vector<VarId> e;
    for (int t = 0; t < T_; ++t) {
      ch.push_back(m_.add_continuous("ts_ch" + ix(name, t), 0.0, ts.charge_p_max));
      dis.push_back(
          m_.add_continuous("ts_dis" + ix(name, t), 0.0, ts.discharge_p_max));
      e.push_back(m_.add_continuous("ts_e" + ix(name, t), ts.e_min, ts.e_max));
    }
    for (int t = 0; t < T_; ++t) {
      VarId prev = e[(t + T_ - 1) % T_];
      LinearExpr bal = LinearExpr(e[t]) - LinearExpr(prev);
      bal.add(ch[t], -ts.charge_eff * dt_);
      bal.add(dis[t], dt_ / ts.discharge_eff);
      m_.add_constraint("ts_soc" + ix(name, t), bal, Sense::eq, 0.0);
    }
    return e;
  }

  void csp(const CspUnit& u) {
    auto x = shift(u.name, u.sf_thermal_deviation);
    CommitmentVars c =
        add_commitment(m_, u.name, T_, u.min_up, u.min_down, u.initial);
    std::vector<VarId> ch, dis;
    store(u.name, u.ts, ch, dis);
    for (int t = 0; t < T_; ++t) {
      Triplet v = unit_vars(u.name, t, u.turbine_p_max);
      add_generation(t, v);
      VarId sf = m_.add_continuous("p_sf" + ix(u.name, t));
      m_.add_constraint("sf_max" + ix(u.name, t), LinearExpr(sf) + x[t],
                        Sense::le, u.sf_thermal_upper[t]);
      LinearExpr conv = (1.0 / u.efficiency) * LinearExpr(v.p) -
                        LinearExpr(sf) - LinearExpr(dis[t]) + LinearExpr(ch[t]);
      conv.add(c.v_su[t], u.startup_loss_mult * u.turbine_p_max);
      m_.add_constraint("csp_conv" + ix(u.name, t), conv, Sense::eq, 0.0);
      m_.add_constraint("csp_max" + ix(u.name, t),
                        LinearExpr(v.p) + LinearExpr(v.up) -
                            u.turbine_p_max * LinearExpr(c.u[t]),
                        Sense::le, 0.0);
      m_.add_constraint("csp_min" + ix(u.name, t),
                        LinearExpr(v.p) - LinearExpr(v.dn) -
                            u.turbine_p_min * LinearExpr(c.u[t]),
                        Sense::ge, 0.0);
      objective_.add(v.p, -u.op_cost * dt_);
    }
  }

  void fd(const FdUnit& u) {
    auto x = shift(u.name, u.demand_upward_deviation);
    std::vector<VarId> pick;
    LinearExpr one;
    for (std::size_t k = 0; k < u.profiles.size(); ++k) {
      pick.push_back(m_.add_binary("u_prof" + ix(u.name, static_cast<int>(k))));
      one.add(pick.back(), 1.0);
      tie_break_.add(pick.back(), -o_.tie_break_epsilon * static_cast<double>(k));
    }
    m_.add_constraint("fd_one" + ix(u.name), one, Sense::eq, 1.0);
    for (int t = 0; t < T_; ++t) {
      Triplet v = unit_vars(u.name, t, milp::kInf);
      dem_[t].add(v.p, 1.0);
      dem_up_[t].add(v.up, 1.0);
      dem_dn_[t].add(v.dn, 1.0);
      LinearExpr floor = LinearExpr(v.p) - x[t];
      for (std::size_t k = 0; k < pick.size(); ++k)
        floor.add(pick[k], -u.profiles[k][t]);
      m_.add_constraint("fd_profile" + ix(u.name, t), floor, Sense::ge, 0.0);
      m_.add_constraint("fd_min" + ix(u.name, t),
                        LinearExpr(v.p) - LinearExpr(v.up), Sense::ge, u.p_min);
      m_.add_constraint("fd_max" + ix(u.name, t),
                        LinearExpr(v.p) + LinearExpr(v.dn), Sense::le, u.p_max);
    }
  }

  // Up-activated, down-activated and no-activation states.
  void balance() {
    for (int t = 0; t < T_; ++t) {
      LinearExpr up = gen_[t] + gen_up_[t] - dem_[t] + dem_up_[t] -
                      LinearExpr(p_da_[t]) - LinearExpr(r_up_[t]);
      LinearExpr dn = gen_[t] - gen_dn_[t] - dem_[t] - dem_dn_[t] -
                      LinearExpr(p_da_[t]) + LinearExpr(r_dn_[t]);
      LinearExpr none = gen_[t] - dem_[t] - LinearExpr(p_da_[t]);
      m_.add_constraint("balance_up" + ix(t), up, Sense::eq, 0.0);
      m_.add_constraint("balance_dn" + ix(t), dn, Sense::eq, 0.0);
      m_.add_constraint("balance" + ix(t), none, Sense::eq, 0.0);
    }
  }

  void price_dual(const std::string& tag, int g,
                  const std::vector<double>& dev,
                  const std::vector<LinearExpr>& exposure) {
    m_.set_attribute("gamma_" + tag, g);
    VarId mu = m_.add_continuous("mu_" + tag);
    objective_.add(mu, -static_cast<double>(g));
    for (int t = 0; t < T_; ++t) {
      VarId xi = m_.add_continuous("xi_" + tag + ix(t));
      objective_.add(xi, -1.0);
      m_.add_constraint("dual_" + tag + ix(t),
                        LinearExpr(mu) + LinearExpr(xi) - dev[t] * exposure[t],
                        Sense::ge, 0.0);
    }
  }

  void price_robustness() {
    std::vector<LinearExpr> x_da(T_), r_up(T_), r_dn(T_);
    for (int t = 0; t < T_; ++t) {
      VarId x = m_.add_continuous("x_da" + ix(t));
      x_da[t] = LinearExpr(x);
      m_.add_constraint("asym_sell" + ix(t),
                        LinearExpr(x) - dt_ * LinearExpr(p_da_[t]), Sense::ge,
                        0.0);
      // Buy side in multiplied form: dn*x + up*p*dt >= 0.
      LinearExpr buy = s_.dam_price_down_dev[t] * LinearExpr(x) +
                       (s_.dam_price_up_dev[t] * dt_) * LinearExpr(p_da_[t]);
      m_.add_constraint("asym_buy" + ix(t), buy, Sense::ge, 0.0);
      r_up[t] = LinearExpr(r_up_[t]);
      r_dn[t] = LinearExpr(r_dn_[t]);
    }
    price_dual("da", b_->gamma_dam, s_.dam_price_down_dev, x_da);
    price_dual("sr_up", b_->gamma_sr_up, s_.srm_up_price_dev, r_up);
    price_dual("sr_dn", b_->gamma_sr_down, s_.srm_down_price_dev, r_dn);
  }

  const Portfolio& p_;
  const MarketScenario& s_;
  const RvppModelOptions& o_;
  const BudgetSet* b_;
  Model m_;
  int T_;
  double dt_;
  std::vector<VarId> p_da_, r_up_, r_dn_;
  std::vector<LinearExpr> gen_, gen_up_, gen_dn_, dem_, dem_up_, dem_dn_;
  LinearExpr objective_;
  LinearExpr tie_break_;
};

}  // namespace

Model build_deterministic_rvpp(const Portfolio& p, const MarketScenario& s,
                               const RvppModelOptions& opts) {
  require_valid(p, s);
  return Builder(p, s, opts, nullptr).build(milp::kDefaultBigM);
}

Model build_robust_rvpp(const Portfolio& p, const MarketScenario& s,
                        const BudgetSet& b, double big_m,
                        const RvppModelOptions& opts) {
  require_valid(p, s);
  auto problems = validate_budgets(b, s.grid.period_count);
  if (!problems.empty()) {
    std::string msg = "invalid budgets:";
    for (const auto& v : problems) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  Model m = Builder(p, s, opts, &b).build(big_m);
  m.set_attribute("robust", 1);
  m.set_attribute("selected_periods",
                  opts.generation_robustness ==
                          GenerationRobustness::selected_periods
                      ? 1
                      : 0);
  return m;
}

}  // namespace rvpp
