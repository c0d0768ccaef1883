#include <algorithm>
#include <cmath>

#include "rvpp/commitment.hpp"
#include "rvpp/oracle.hpp"

namespace rvpp::oracle {

double ReplayReport::worst() const {
  double w = 0.0;
  for (const auto& [family, r] : residual) w = std::max(w, r);
  return w;
}

namespace {

class Residuals {
 public:
  explicit Residuals(ReplayReport& r) : r_(r) {}
  // Inequality row `lhs <= 0`.
  void le(const std::string& family, double lhs) {
    double& slot = r_.residual[family];
    slot = std::max(slot, std::max(0.0, lhs));
  }
  void eq(const std::string& family, double lhs) { le(family, std::fabs(lhs)); }
  void nonneg(const std::vector<double>& v) {
    for (double x : v) le("nonneg", -x);
  }

 private:
  ReplayReport& r_;
};

const UnitSchedule& need(const RvppSchedule& sc, const std::string& name) {
  const UnitSchedule* u = sc.unit(name);
  if (!u) throw std::invalid_argument("schedule lacks unit '" + name + "'");
  return *u;
}

}  // namespace

ReplayReport replay_schedule(const RvppSchedule& sc, const Portfolio& p,
                             const MarketScenario& s,
                             const RvppModelOptions& opts) {
  ReplayReport rep;
  Residuals R(rep);
  const int T = s.grid.period_count;
  const double dt = s.grid.delta_t;

  for (int t = 0; t < T; ++t) {
    double up = -sc.p_da[t] - sc.r_sr_up[t];
    double dn = -sc.p_da[t] + sc.r_sr_dn[t];
    double none = -sc.p_da[t];
    for (const auto& u : sc.units) {
      double sign = u.unit_class == UnitClass::fd ? -1.0 : 1.0;
      up += sign * u.p[t] + u.r_up[t];
      dn += sign * u.p[t] - u.r_dn[t];
      none += sign * u.p[t];
    }
    R.eq("balance_up", up);
    R.eq("balance_dn", dn);
    R.eq("balance", none);
  }
  R.nonneg(sc.r_sr_up);
  R.nonneg(sc.r_sr_dn);
  for (const auto& u : sc.units) {
    R.nonneg(u.p);
    R.nonneg(u.r_up);
    R.nonneg(u.r_dn);
  }

  auto commitment = [&](const std::string& name, const UnitSchedule& us,
                        int min_up, int min_down,
                        const InitialCommitment& init) {
    for (auto& msg : check_commitment(us.u, us.v_su, us.v_sd, min_up, min_down,
                                      init))
      rep.flags.push_back(name + ": " + msg);
  };

  for (const auto& d : p.drs) {
    const UnitSchedule& us = need(sc, d.name);
    double energy = 0.0;
    for (int t = 0; t < T; ++t) {
      R.le("drs_max", us.p[t] + us.r_up[t] - d.p_max * us.u[t]);
      R.le("drs_min", d.p_min * us.u[t] - (us.p[t] - us.r_dn[t]));
      energy += us.p[t] * dt + us.r_up[t] * (opts.literal_3c ? 1.0 : dt);
    }
    R.le("drs_energy", energy - d.daily_energy_limit);
    commitment(d.name, us, d.min_up, d.min_down, d.initial);
  }

  for (const auto& n : p.ndrs) {
    const UnitSchedule& us = need(sc, n.name);
    for (int t = 0; t < T; ++t) {
      R.le("ndrs_max", us.p[t] + us.r_up[t] - n.forecast_upper[t]);
      R.le("ndrs_min", n.p_min - (us.p[t] - us.r_dn[t]));
    }
  }

  for (const auto& c : p.csp) {
    const UnitSchedule& us = need(sc, c.name);
    auto it = std::find_if(sc.csp.begin(), sc.csp.end(),
                           [&](const auto& x) { return x.name == c.name; });
    if (it == sc.csp.end())
      throw std::invalid_argument("schedule lacks CSP '" + c.name + "'");
    const CspThermalSchedule& th = *it;
    R.eq("ts_cycle", th.ts_energy.front() - th.ts_energy.back());
    for (int t = 0; t < T; ++t) {
      R.le("sf_max", th.p_sf[t] - c.sf_thermal_upper[t]);
      R.le("nonneg", -th.p_sf[t]);
      double thermal = th.p_sf[t] + th.ts_discharge[t] - th.ts_charge[t] -
                       c.startup_loss_mult * us.v_su[t] * c.turbine_p_max;
      R.eq("csp_conv", us.p[t] / c.efficiency - thermal);
      R.le("csp_max", us.p[t] + us.r_up[t] - c.turbine_p_max * us.u[t]);
      R.le("csp_min", c.turbine_p_min * us.u[t] - (us.p[t] - us.r_dn[t]));
      double next = th.ts_energy[t] + c.ts.charge_eff * th.ts_charge[t] * dt -
                    th.ts_discharge[t] * dt / c.ts.discharge_eff;
      R.eq("ts_soc", th.ts_energy[t + 1] - next);
      R.le("ts_bounds", th.ts_energy[t + 1] - c.ts.e_max);
      R.le("ts_bounds", c.ts.e_min - th.ts_energy[t + 1]);
      R.le("ts_power", th.ts_charge[t] - c.ts.charge_p_max);
      R.le("ts_power", th.ts_discharge[t] - c.ts.discharge_p_max);
      R.le("nonneg", -th.ts_charge[t]);
      R.le("nonneg", -th.ts_discharge[t]);
    }
    commitment(c.name, us, c.min_up, c.min_down, c.initial);
  }

  for (const auto& d : p.fd) {
    const UnitSchedule& us = need(sc, d.name);
    int k = -1, picks = 0;
    for (const auto& [name, idx] : sc.fd_profile)
      if (name == d.name) k = idx, ++picks;
    if (picks != 1 || k < 0 || k >= static_cast<int>(d.profiles.size())) {
      rep.flags.push_back(d.name + ": no single valid profile selected");
      continue;
    }
    for (int t = 0; t < T; ++t) {
      R.le("fd_profile", d.profiles[k][t] - us.p[t]);
      R.le("fd_min", d.p_min - (us.p[t] - us.r_up[t]));
      R.le("fd_max", us.p[t] + us.r_dn[t] - d.p_max);
    }
  }
  return rep;
}

ReplayReport replay_schedule(const EsSchedule& sc, const EsFleet& f,
                             const MarketScenario& s,
                             const EsModelOptions& opts) {
  ReplayReport rep;
  Residuals R(rep);
  const EsUnit e = f.scaled();
  const int T = s.grid.period_count;
  const double dt = s.grid.delta_t;
  const double span = e.e_max - e.e_min;
  const double floor_share =
      opts.symmetric_sigma_margins ? sc.sigma_dn : sc.sigma_up;
  double env_up = 0.0, env_dn = 0.0;
  R.eq("soc_cycle", sc.soc.front() - sc.soc.back());
  for (int t = 0; t < T; ++t) {
    const double on = sc.charging[t] ? 1.0 : 0.0;
    if (sc.p_ch[t] != 0.0 && sc.p_dis[t] != 0.0)
      rep.flags.push_back("charging and discharging together at period " +
                          std::to_string(t));
    R.le("ch_min", e.charge_p_min * on - (sc.p_ch[t] - sc.r_up_ch[t]));
    R.le("ch_max", sc.p_ch[t] + sc.r_dn_ch[t] - e.charge_p_max * on);
    R.le("dis_max", sc.p_dis[t] + sc.r_up_dis[t] - e.discharge_p_max * (1 - on));
    R.le("dis_min",
         e.discharge_p_min * (1 - on) - (sc.p_dis[t] - sc.r_dn_dis[t]));
    R.eq("net", sc.p_net[t] - (sc.p_dis[t] - sc.p_ch[t]));
    R.eq("reserve_sum", sc.r_up[t] - sc.r_up_ch[t] - sc.r_up_dis[t]);
    R.eq("reserve_sum", sc.r_dn[t] - sc.r_dn_ch[t] - sc.r_dn_dis[t]);
    double next = sc.soc[t] + sc.p_ch[t] * e.charge_eff * dt -
                  sc.p_dis[t] * dt / e.discharge_eff;
    R.eq("soc", sc.soc[t + 1] - next);
    R.le("soc_margin", e.e_min + floor_share * span - sc.soc[t + 1]);
    R.le("soc_margin", sc.soc[t + 1] - (e.e_max - sc.sigma_dn * span));
    for (double x : {sc.p_ch[t], sc.p_dis[t], sc.r_up_ch[t], sc.r_dn_ch[t],
                     sc.r_up_dis[t], sc.r_dn_dis[t]})
      R.le("nonneg", -x);
    env_up += sc.r_up[t] * dt / e.discharge_eff;
    env_dn += sc.r_dn[t] * e.charge_eff * dt;
  }
  R.le("envelope_up", env_up - sc.sigma_up * span);
  R.le("envelope_dn", env_dn - sc.sigma_dn * span);
  R.le("sigma", -sc.sigma_up);
  R.le("sigma", sc.sigma_up - 1.0);
  R.le("sigma", -sc.sigma_dn);
  R.le("sigma", sc.sigma_dn - 1.0);
  return rep;
}

}  // namespace rvpp::oracle
