#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rvpp/rvpp_model.hpp"

namespace rvpp {

using milp::Model;
using milp::Solution;

const UnitSchedule* RvppSchedule::unit(std::string_view name) const {
  for (const auto& u : units)
    if (u.name == name) return &u;
  return nullptr;
}

double PriceDual::penalty() const {
  double s = gamma * mu;
  for (double v : xi) s += v;
  return s;
}

double RobustArtifacts::price_penalty() const {
  return dam.penalty() + sr_up.penalty() + sr_dn.penalty();
}

namespace {

std::string ix(int t) { return "(" + std::to_string(t) + ")"; }
std::string ix(const std::string& u, int t) {
  return "(" + u + "," + std::to_string(t) + ")";
}
std::string ix(const std::string& u) { return "(" + u + ")"; }

class Reader {
 public:
  Reader(const Model& m, const Solution& s) : m_(m), s_(s) {}

  double value(const std::string& name) const {
    auto id = m_.find_variable(name);
    if (!id) throw DecodeError("solution has no variable '" + name + "'");
    return s_.value(*id);
  }
  bool has(const std::string& name) const {
    return m_.find_variable(name).has_value();
  }
  std::vector<double> series(const std::string& base, int T) const {
    std::vector<double> out(T);
    for (int t = 0; t < T; ++t) out[t] = value(base + ix(t));
    return out;
  }
  std::vector<double> series(const std::string& base, const std::string& unit,
                             int T) const {
    std::vector<double> out(T);
    for (int t = 0; t < T; ++t) out[t] = value(base + ix(unit, t));
    return out;
  }
  std::vector<int> flags(const std::string& base, const std::string& unit,
                         int T) const {
    std::vector<int> out(T);
    for (int t = 0; t < T; ++t)
      out[t] = value(base + ix(unit, t)) > 0.5 ? 1 : 0;
    return out;
  }

 private:
  const Model& m_;
  const Solution& s_;
};

UnitSchedule read_unit(const Reader& r, const std::string& name, UnitClass c,
                       int T, bool committed) {
  UnitSchedule u;
  u.name = name;
  u.unit_class = c;
  u.p = r.series("p", name, T);
  u.r_up = r.series("r_up", name, T);
  u.r_dn = r.series("r_dn", name, T);
  if (committed) {
    u.u = r.flags("u", name, T);
    u.v_su = r.flags("v_su", name, T);
    u.v_sd = r.flags("v_sd", name, T);
  }
  return u;
}

PriceDual read_dual(const Reader& r, const Model& m, const std::string& tag,
                    int T) {
  PriceDual d;
  d.gamma = static_cast<int>(m.attribute("gamma_" + tag).value_or(0));
  d.mu = r.value("mu_" + tag);
  d.xi = r.series("xi_" + tag, T);
  return d;
}

}  // namespace

RvppDecoded extract_rvpp_schedule(const Model& m, const Solution& sol,
                                  const Portfolio& p, const MarketScenario& s,
                                  const RvppModelOptions& opts) {
  (void)opts;
  if (!sol.optimal())
    throw DecodeError("cannot decode a solution with status '" +
                      std::string(milp::to_string(sol.status)) + "'");
  if (sol.values.size() != m.variables().size())
    throw DecodeError("solution size does not match the model");
  const int T = s.grid.period_count;
  Reader r(m, sol);

  RvppDecoded out;
  RvppSchedule& sc = out.schedule;
  sc.grid = s.grid;
  sc.p_da = r.series("p_da", T);
  sc.r_sr_up = r.series("r_sr_up", T);
  sc.r_sr_dn = r.series("r_sr_dn", T);
  for (const auto& u : p.drs)
    sc.units.push_back(read_unit(r, u.name, UnitClass::drs, T, true));
  for (const auto& u : p.ndrs)
    sc.units.push_back(read_unit(r, u.name, UnitClass::ndrs, T, false));
  for (const auto& u : p.csp) {
    sc.units.push_back(read_unit(r, u.name, UnitClass::csp, T, true));
    CspThermalSchedule th;
    th.name = u.name;
    th.p_sf = r.series("p_sf", u.name, T);
    th.ts_charge = r.series("ts_ch", u.name, T);
    th.ts_discharge = r.series("ts_dis", u.name, T);
    auto e = r.series("ts_e", u.name, T);
    th.ts_energy.push_back(e.back());
    th.ts_energy.insert(th.ts_energy.end(), e.begin(), e.end());
    sc.csp.push_back(std::move(th));
  }
  for (const auto& u : p.fd) {
    sc.units.push_back(read_unit(r, u.name, UnitClass::fd, T, false));
    int chosen = -1;
    for (std::size_t k = 0; k < u.profiles.size(); ++k)
      if (r.value("u_prof" + ix(u.name, static_cast<int>(k))) > 0.5) {
        if (chosen >= 0)
          throw DecodeError("flexible demand '" + u.name +
                            "' selects more than one profile");
        chosen = static_cast<int>(k);
      }
    if (chosen < 0)
      throw DecodeError("flexible demand '" + u.name + "' selects no profile");
    sc.fd_profile.emplace_back(u.name, chosen);
  }
  sc.objective = sol.objective_value;
  sc.nominal_profit = rvpp_nominal_profit(sc, p, s);

  double residual = rvpp_balance_residual(sc, p);
  if (residual > milp::kFeasibilityTol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "balance residual %.3g exceeds tolerance",
                  residual);
    throw DecodeError(buf);
  }

  double recomputed = sc.nominal_profit;
  if (m.attribute("robust").value_or(0) > 0) {
    RobustArtifacts a;
    a.mode = m.attribute("selected_periods").value_or(0) > 0
                 ? GenerationRobustness::selected_periods
                 : GenerationRobustness::per_period;
    a.dam = read_dual(r, m, "da", T);
    a.sr_up = read_dual(r, m, "sr_up", T);
    a.sr_dn = read_dual(r, m, "sr_dn", T);
    a.x_da = r.series("x_da", T);
    for (const auto& name : p.unit_names()) {
      auto dev = unit_deviation(p, name);
      if (dev.empty()) continue;
      UnitRobustness ur;
      ur.name = name;
      ur.gamma = static_cast<int>(m.attribute("gamma" + ix(name)).value_or(0));
      ur.deviation = dev;
      if (a.mode == GenerationRobustness::selected_periods) {
        ur.x = r.series("x", name, T);
        ur.mu = r.value("mu" + ix(name));
        ur.xi = r.series("xi", name, T);
        ur.q = r.flags("q", name, T);
      } else {
        ur.x.assign(T, 0.0);
        if (ur.gamma >= 1) ur.x = dev;
      }
      a.units.push_back(std::move(ur));
    }
    recomputed -= a.price_penalty();
    out.robust = std::move(a);
  }
  if (!milp::close_rel(recomputed, sc.objective, milp::kOptimalityRelTol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "objective %.10g disagrees with the decoded schedule (%.10g)",
                  sc.objective, recomputed);
    throw DecodeError(buf);
  }
  return out;
}

double rvpp_nominal_profit(const RvppSchedule& sc, const Portfolio& p,
                           const MarketScenario& s) {
  const int T = sc.grid.period_count;
  const double dt = sc.grid.delta_t;
  double total = 0.0;
  for (int t = 0; t < T; ++t)
    total += s.dam_price_median[t] * sc.p_da[t] * dt +
             s.srm_up_price_nominal[t] * sc.r_sr_up[t] +
             s.srm_down_price_nominal[t] * sc.r_sr_dn[t];
  auto cost = [&](const std::string& name, double op) {
    const UnitSchedule* u = sc.unit(name);
    if (!u) throw std::invalid_argument("schedule lacks unit '" + name + "'");
    double c = 0.0;
    for (int t = 0; t < T; ++t) c += op * u->p[t] * dt;
    return std::pair{u, c};
  };
  for (const auto& d : p.drs) {
    auto [u, c] = cost(d.name, d.op_cost);
    total -= c;
    for (int t = 0; t < T; ++t)
      total -= d.startup_cost * u->v_su[t] + d.shutdown_cost * u->v_sd[t];
  }
  for (const auto& n : p.ndrs) total -= cost(n.name, n.op_cost).second;
  for (const auto& c : p.csp) total -= cost(c.name, c.op_cost).second;
  return total;
}

double rvpp_balance_residual(const RvppSchedule& sc, const Portfolio& p) {
  const int T = sc.grid.period_count;
  std::vector<bool> demand(sc.units.size(), false);
  for (std::size_t i = 0; i < sc.units.size(); ++i)
    demand[i] = sc.units[i].unit_class == UnitClass::fd;
  (void)p;
  double worst = 0.0;
  for (int t = 0; t < T; ++t) {
    double up = -sc.p_da[t] - sc.r_sr_up[t];
    double dn = -sc.p_da[t] + sc.r_sr_dn[t];
    double none = -sc.p_da[t];
    for (std::size_t i = 0; i < sc.units.size(); ++i) {
      const auto& u = sc.units[i];
      if (demand[i]) {
        up -= u.p[t] - u.r_up[t];
        dn -= u.p[t] + u.r_dn[t];
        none -= u.p[t];
      } else {
        up += u.p[t] + u.r_up[t];
        dn += u.p[t] - u.r_dn[t];
        none += u.p[t];
      }
    }
    worst = std::max({worst, std::fabs(up), std::fabs(dn), std::fabs(none)});
  }
  return worst;
}

}  // namespace rvpp
