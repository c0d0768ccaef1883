#include "rvpp/es_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rvpp {

using milp::Direction;
using milp::LinearExpr;
using milp::Model;
using milp::Sense;
using milp::VarId;

EsUnit EsFleet::scaled() const {
  EsUnit u = module;
  const double n = module_count;
  u.charge_p_max *= n;
  u.charge_p_min *= n;
  u.discharge_p_max *= n;
  u.discharge_p_min *= n;
  u.e_max *= n;
  u.e_min *= n;
  return u;
}

std::vector<std::string> validate_es_fleet(const EsFleet& f) {
  auto out = validate_es_unit(f.module);
  if (f.module_count < 1)
    out.push_back("es fleet: module_count = " + std::to_string(f.module_count) +
                  " must be >= 1");
  return out;
}

namespace {

std::string ix(int t) { return "(" + std::to_string(t) + ")"; }

void require_valid(const EsFleet& f, const MarketScenario& s) {
  auto problems = validate_es_fleet(f);
  auto market = validate_portfolio(Portfolio{}, s);
  problems.insert(problems.end(), market.begin(), market.end());
  if (problems.empty()) return;
  std::string msg = "invalid storage fleet/scenario:";
  for (const auto& v : problems) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

struct EsVars {
  std::vector<VarId> p_ch, p_dis, r_up, r_dn;
};

EsVars add_es(Model& m, LinearExpr& obj, const EsUnit& e,
              const MarketScenario& s, const EsModelOptions& o) {
  const int T = s.grid.period_count;
  const double dt = s.grid.delta_t;
  const double span = e.e_max - e.e_min;
  EsVars v;
  VarId sig_up = m.add_continuous("sigma_up", 0.0, 1.0);
  VarId sig_dn = m.add_continuous("sigma_dn", 0.0, 1.0);
  std::vector<VarId> soc;
  LinearExpr env_up, env_dn;
  for (int t = 0; t < T; ++t) {
    VarId ch = m.add_continuous("p_ch" + ix(t), 0.0, e.charge_p_max);
    VarId dis = m.add_continuous("p_dis" + ix(t), 0.0, e.discharge_p_max);
    VarId net = m.add_continuous("p_net" + ix(t), -milp::kInf, milp::kInf);
    VarId mode = m.add_binary("u_ch" + ix(t));
    VarId ruc = m.add_continuous("r_up_ch" + ix(t));
    VarId rdc = m.add_continuous("r_dn_ch" + ix(t));
    VarId rud = m.add_continuous("r_up_dis" + ix(t));
    VarId rdd = m.add_continuous("r_dn_dis" + ix(t));
    VarId ru = m.add_continuous("r_up" + ix(t));
    VarId rd = m.add_continuous("r_dn" + ix(t));
    soc.push_back(m.add_continuous("soc" + ix(t), e.e_min, e.e_max));

    m.add_constraint("ch_min" + ix(t),
                     LinearExpr(ch) - LinearExpr(ruc) -
                         e.charge_p_min * LinearExpr(mode),
                     Sense::ge, 0.0);
    m.add_constraint("ch_max" + ix(t),
                     LinearExpr(ch) + LinearExpr(rdc) -
                         e.charge_p_max * LinearExpr(mode),
                     Sense::le, 0.0);
    m.add_constraint("dis_max" + ix(t),
                     LinearExpr(dis) + LinearExpr(rud) +
                         e.discharge_p_max * LinearExpr(mode),
                     Sense::le, e.discharge_p_max);
    m.add_constraint("dis_min" + ix(t),
                     LinearExpr(dis) - LinearExpr(rdd) -
                         e.discharge_p_min * LinearExpr(mode),
                     Sense::ge, e.discharge_p_min);
    m.add_constraint("net" + ix(t),
                     LinearExpr(net) - LinearExpr(dis) + LinearExpr(ch),
                     Sense::eq, 0.0);
    m.add_constraint("r_up_sum" + ix(t),
                     LinearExpr(ru) - LinearExpr(ruc) - LinearExpr(rud),
                     Sense::eq, 0.0);
    m.add_constraint("r_dn_sum" + ix(t),
                     LinearExpr(rd) - LinearExpr(rdc) - LinearExpr(rdd),
                     Sense::eq, 0.0);
    env_up.add(ru, dt / e.discharge_eff);
    env_dn.add(rd, e.charge_eff * dt);

    obj.add(net, s.dam_price_median[t] * dt);
    obj.add(ru, s.srm_up_price_nominal[t]);
    obj.add(rd, s.srm_down_price_nominal[t]);
    obj.add(dis, -e.op_cost * dt);
    v.p_ch.push_back(ch);
    v.p_dis.push_back(dis);
    v.r_up.push_back(ru);
    v.r_dn.push_back(rd);
  }
  for (int t = 0; t < T; ++t) {
    LinearExpr step = LinearExpr(soc[t]) - LinearExpr(soc[(t + T - 1) % T]);
    step.add(v.p_ch[t], -e.charge_eff * dt);
    step.add(v.p_dis[t], dt / e.discharge_eff);
    m.add_constraint("soc" + ix(t), step, Sense::eq, 0.0);
    VarId floor_share = o.symmetric_sigma_margins ? sig_dn : sig_up;
    m.add_constraint("soc_floor" + ix(t),
                     LinearExpr(soc[t]) - span * LinearExpr(floor_share),
                     Sense::ge, e.e_min);
    m.add_constraint("soc_head" + ix(t),
                     LinearExpr(soc[t]) + span * LinearExpr(sig_dn), Sense::le,
                     e.e_max);
  }
  m.add_constraint("envelope_up", env_up - span * LinearExpr(sig_up), Sense::le,
                   0.0);
  m.add_constraint("envelope_dn", env_dn - span * LinearExpr(sig_dn), Sense::le,
                   0.0);
  return v;
}

void price_dual(Model& m, LinearExpr& obj, const std::string& tag, int g,
                int T, const std::vector<LinearExpr>& exposure) {
  m.set_attribute("gamma_" + tag, g);
  VarId mu = m.add_continuous("mu_" + tag);
  obj.add(mu, -static_cast<double>(g));
  for (int t = 0; t < T; ++t) {
    VarId xi = m.add_continuous("xi_" + tag + ix(t));
    obj.add(xi, -1.0);
    m.add_constraint("dual_" + tag + ix(t),
                     LinearExpr(mu) + LinearExpr(xi) - exposure[t], Sense::ge,
                     0.0);
  }
}

Model build(const EsFleet& f, const MarketScenario& s, const BudgetSet* b,
            const EsModelOptions& o) {
  require_valid(f, s);
  const int T = s.grid.period_count;
  const double dt = s.grid.delta_t;
  Model m(b ? "robust_es" : "deterministic_es");
  m.set_attribute("module_count", f.module_count);
  m.set_attribute("symmetric_sigma_margins", o.symmetric_sigma_margins);
  LinearExpr obj;
  EsVars v = add_es(m, obj, f.scaled(), s, o);
  if (b) {
    std::vector<LinearExpr> da(T), up(T), dn(T);
    for (int t = 0; t < T; ++t) {
      da[t] = (s.dam_price_down_dev[t] * dt) * LinearExpr(v.p_dis[t]) +
              (s.dam_price_up_dev[t] * dt) * LinearExpr(v.p_ch[t]);
      up[t] = s.srm_up_price_dev[t] * LinearExpr(v.r_up[t]);
      dn[t] = s.srm_down_price_dev[t] * LinearExpr(v.r_dn[t]);
    }
    price_dual(m, obj, "da", b->gamma_dam, T, da);
    price_dual(m, obj, "sr_up", b->gamma_sr_up, T, up);
    price_dual(m, obj, "sr_dn", b->gamma_sr_down, T, dn);
    m.set_attribute("robust", 1);
  }
  m.set_objective(Direction::maximize, obj);
  return m;
}

}  // namespace

Model build_deterministic_es(const EsFleet& f, const MarketScenario& s,
                             const EsModelOptions& o) {
  return build(f, s, nullptr, o);
}

Model build_robust_es(const EsFleet& f, const MarketScenario& s,
                      const BudgetSet& b, const EsModelOptions& o) {
  auto problems = validate_budgets(b, s.grid.period_count);
  for (const auto& [name, g] : b.gamma_per_unit)
    if (g != 0)
      problems.push_back("storage model takes price budgets only; '" + name +
                         "' has budget " + std::to_string(g));
  if (!problems.empty()) {
    std::string msg = "invalid storage budgets:";
    for (const auto& v : problems) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  return build(f, s, &b, o);
}

namespace {

class Reader {
 public:
  Reader(const Model& m, const milp::Solution& s) : m_(m), s_(s) {}
  double value(const std::string& name) const {
    auto id = m_.find_variable(name);
    if (!id) throw DecodeError("solution has no variable '" + name + "'");
    return s_.value(*id);
  }
  std::vector<double> series(const std::string& base, int T) const {
    std::vector<double> out(T);
    for (int t = 0; t < T; ++t) out[t] = value(base + ix(t));
    return out;
  }

 private:
  const Model& m_;
  const milp::Solution& s_;
};

PriceDual read_dual(const Reader& r, const Model& m, const std::string& tag,
                    int T) {
  PriceDual d;
  d.gamma = static_cast<int>(m.attribute("gamma_" + tag).value_or(0));
  d.mu = r.value("mu_" + tag);
  d.xi = r.series("xi_" + tag, T);
  return d;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

}  // namespace

EsSchedule extract_es_schedule(const Model& m, const milp::Solution& sol,
                               const EsFleet& f, const MarketScenario& s) {
  if (!sol.optimal())
    throw DecodeError("cannot decode a solution with status '" +
                      std::string(milp::to_string(sol.status)) + "'");
  if (sol.values.size() != m.variables().size())
    throw DecodeError("solution size does not match the model");
  const int T = s.grid.period_count;
  const double dt = s.grid.delta_t;
  const EsUnit e = f.scaled();
  Reader r(m, sol);
  EsSchedule sc;
  sc.grid = s.grid;
  sc.p_ch = r.series("p_ch", T);
  sc.p_dis = r.series("p_dis", T);
  sc.p_net = r.series("p_net", T);
  sc.r_up_ch = r.series("r_up_ch", T);
  sc.r_dn_ch = r.series("r_dn_ch", T);
  sc.r_up_dis = r.series("r_up_dis", T);
  sc.r_dn_dis = r.series("r_dn_dis", T);
  sc.r_up = r.series("r_up", T);
  sc.r_dn = r.series("r_dn", T);
  for (double x : r.series("u_ch", T)) sc.charging.push_back(x > 0.5 ? 1 : 0);
  auto level = r.series("soc", T);
  sc.soc.push_back(level.back());
  sc.soc.insert(sc.soc.end(), level.begin(), level.end());
  sc.sigma_up = r.value("sigma_up");
  sc.sigma_dn = r.value("sigma_dn");
  sc.objective = sol.objective_value;
  // The idle side of each period must be zero up to solver tolerance; it is
  // then stored as exactly zero.
  const double tol = milp::kFeasibilityTol;
  for (int t = 0; t < T; ++t) {
    const bool ch = sc.charging[t] == 1;
    for (auto* v : ch ? std::vector<double*>{&sc.p_dis[t], &sc.r_up_dis[t],
                                             &sc.r_dn_dis[t]}
                      : std::vector<double*>{&sc.p_ch[t], &sc.r_up_ch[t],
                                             &sc.r_dn_ch[t]}) {
      if (std::fabs(*v) > tol)
        throw DecodeError(fmt("%s mode carries %.6g MW on the idle side at "
                              "period %d",
                              ch ? "charging" : "discharging", *v, t));
      *v = 0.0;
    }
    sc.p_net[t] = sc.p_dis[t] - sc.p_ch[t];
    sc.r_up[t] = sc.r_up_ch[t] + sc.r_up_dis[t];
    sc.r_dn[t] = sc.r_dn_ch[t] + sc.r_dn_dis[t];
  }
  sc.nominal_profit = es_nominal_profit(sc, f, s);

  double e_level = sc.soc.front();
  for (int t = 0; t < T; ++t) {
    e_level += sc.p_ch[t] * e.charge_eff * dt - sc.p_dis[t] * dt / e.discharge_eff;
    if (std::fabs(e_level - sc.soc[t + 1]) > tol)
      throw DecodeError(fmt("recomputed SOC %.9g differs from decoded %.9g at "
                            "period %d",
                            e_level, sc.soc[t + 1], t));
  }

  double recomputed = sc.nominal_profit;
  if (m.attribute("robust").value_or(0) > 0) {
    EsPriceDuals d;
    d.dam = read_dual(r, m, "da", T);
    d.sr_up = read_dual(r, m, "sr_up", T);
    d.sr_dn = read_dual(r, m, "sr_dn", T);
    recomputed -= d.penalty();
    sc.robust = d;
  }
  if (!milp::close_rel(recomputed, sc.objective, milp::kOptimalityRelTol))
    throw DecodeError(fmt("objective %.10g disagrees with the decoded "
                          "schedule (%.10g)",
                          sc.objective, recomputed));
  return sc;
}

double es_nominal_profit(const EsSchedule& sc, const EsFleet& f,
                         const MarketScenario& s) {
  const double dt = sc.grid.delta_t;
  const double cost = f.module.op_cost;
  double total = 0.0;
  for (int t = 0; t < sc.grid.period_count; ++t)
    total += s.dam_price_median[t] * (sc.p_dis[t] - sc.p_ch[t]) * dt +
             s.srm_up_price_nominal[t] * sc.r_up[t] +
             s.srm_down_price_nominal[t] * sc.r_dn[t] -
             cost * sc.p_dis[t] * dt;
  return total;
}

std::vector<std::string> es_violations(const EsSchedule& sc, const EsFleet& f,
                                       const EsModelOptions& o, double tol) {
  std::vector<std::string> out;
  const EsUnit e = f.scaled();
  const int T = sc.grid.period_count;
  const double dt = sc.grid.delta_t;
  const double span = e.e_max - e.e_min;
  auto fail = [&](const char* what, auto... a) {
    out.push_back(fmt(what, a...));
  };
  for (int t = 0; t < T; ++t) {
    const double on = sc.charging[t] ? 1.0 : 0.0;
    if (sc.p_ch[t] * sc.p_dis[t] != 0.0)
      fail("charge %g and discharge %g together at period %d", sc.p_ch[t],
           sc.p_dis[t], t);
    if (sc.p_ch[t] - sc.r_up_ch[t] < e.charge_p_min * on - tol)
      fail("charge %g minus up reserve below minimum %g at period %d",
           sc.p_ch[t] - sc.r_up_ch[t], e.charge_p_min * on, t);
    if (sc.p_ch[t] + sc.r_dn_ch[t] > e.charge_p_max * on + tol)
      fail("charge %g plus down reserve above maximum %g at period %d",
           sc.p_ch[t] + sc.r_dn_ch[t], e.charge_p_max * on, t);
    if (sc.p_dis[t] + sc.r_up_dis[t] > e.discharge_p_max * (1 - on) + tol)
      fail("discharge %g plus up reserve above maximum %g at period %d",
           sc.p_dis[t] + sc.r_up_dis[t], e.discharge_p_max * (1 - on), t);
    if (sc.p_dis[t] - sc.r_dn_dis[t] < e.discharge_p_min * (1 - on) - tol)
      fail("discharge %g minus down reserve below minimum %g at period %d",
           sc.p_dis[t] - sc.r_dn_dis[t], e.discharge_p_min * (1 - on), t);
    for (double x : {sc.p_ch[t], sc.p_dis[t], sc.r_up_ch[t], sc.r_dn_ch[t],
                     sc.r_up_dis[t], sc.r_dn_dis[t]})
      if (x < -tol) fail("negative quantity %g at period %d", x, t);
    if (std::fabs(sc.r_up[t] - sc.r_up_ch[t] - sc.r_up_dis[t]) > tol)
      fail("up reserve %g is not the sum of its parts %g at period %d",
           sc.r_up[t], sc.r_up_ch[t] + sc.r_up_dis[t], t);
    if (std::fabs(sc.r_dn[t] - sc.r_dn_ch[t] - sc.r_dn_dis[t]) > tol)
      fail("down reserve %g is not the sum of its parts %g at period %d",
           sc.r_dn[t], sc.r_dn_ch[t] + sc.r_dn_dis[t], t);
    double next = sc.soc[t] + sc.p_ch[t] * e.charge_eff * dt -
                  sc.p_dis[t] * dt / e.discharge_eff;
    if (std::fabs(next - sc.soc[t + 1]) > tol)
      fail("SOC %g does not follow the recursion (%g) at period %d",
           sc.soc[t + 1], next, t);
    double floor_share = o.symmetric_sigma_margins ? sc.sigma_dn : sc.sigma_up;
    double lo = e.e_min + floor_share * span;
    double hi = e.e_max - sc.sigma_dn * span;
    if (sc.soc[t + 1] < lo - tol || sc.soc[t + 1] > hi + tol)
      fail("SOC %g outside its reserve margins (floor %g) at period %d",
           sc.soc[t + 1], lo, t);
  }
  if (std::fabs(sc.soc.front() - sc.soc.back()) > tol)
    fail("SOC cycle open: start %g, end %g", sc.soc.front(), sc.soc.back());
  double env_up = 0.0, env_dn = 0.0;
  for (int t = 0; t < T; ++t) {
    env_up += sc.r_up[t] * dt / e.discharge_eff;
    env_dn += sc.r_dn[t] * e.charge_eff * dt;
  }
  if (env_up > sc.sigma_up * span + tol)
    fail("up-reserve energy %g exceeds its share %g", env_up,
         sc.sigma_up * span);
  if (env_dn > sc.sigma_dn * span + tol)
    fail("down-reserve energy %g exceeds its share %g", env_dn,
         sc.sigma_dn * span);
  return out;
}

}  // namespace rvpp
