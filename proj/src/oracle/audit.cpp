#include <algorithm>
#include <cmath>
#include <functional>

#include "rvpp/oracle.hpp"

namespace rvpp::oracle {

namespace {

// One uncertain row family of one unit: `excess(t, degraded)` is how far the
// schedule sits beyond the row's bound, with or without the deviation.
struct Stream {
  std::string unit;
  std::string family;
  int gamma = 0;
  std::function<double(int, bool)> excess;
};

std::vector<Stream> streams(const RvppSchedule& sc, const Portfolio& p,
                            const BudgetSet& b) {
  std::vector<Stream> out;
  auto need = [&](const std::string& name) -> const UnitSchedule& {
    const UnitSchedule* u = sc.unit(name);
    if (!u) throw std::invalid_argument("schedule lacks unit '" + name + "'");
    return *u;
  };
  for (const auto& u : p.ndrs) {
    const UnitSchedule& us = need(u.name);
    out.push_back({u.name, "ndrs_max", b.unit(u.name),
                   [&us, &u](int t, bool deg) {
                     double bound = u.forecast_upper[t] -
                                    (deg ? u.forecast_deviation[t] : 0.0);
                     return us.p[t] + us.r_up[t] - bound;
                   }});
  }
  for (const auto& u : p.csp) {
    auto it = std::find_if(sc.csp.begin(), sc.csp.end(),
                           [&](const auto& c) { return c.name == u.name; });
    if (it == sc.csp.end())
      throw std::invalid_argument("schedule lacks CSP '" + u.name + "'");
    const CspThermalSchedule& th = *it;
    out.push_back({u.name, "sf_max", b.unit(u.name),
                   [&th, &u](int t, bool deg) {
                     double bound = u.sf_thermal_upper[t] -
                                    (deg ? u.sf_thermal_deviation[t] : 0.0);
                     return th.p_sf[t] - bound;
                   }});
  }
  for (const auto& u : p.fd) {
    const UnitSchedule& us = need(u.name);
    int k = -1;
    for (const auto& [name, idx] : sc.fd_profile)
      if (name == u.name) k = idx;
    if (k < 0 || k >= static_cast<int>(u.profiles.size()))
      throw std::invalid_argument("schedule lacks a profile for '" + u.name +
                                  "'");
    const std::vector<double>& prof = u.profiles[k];
    out.push_back({u.name, "fd_profile", b.unit(u.name),
                   [&us, &u, &prof](int t, bool deg) {
                     double floor =
                         prof[t] + (deg ? u.demand_upward_deviation[t] : 0.0);
                     return floor - us.p[t];
                   }});
  }
  return out;
}

void record(std::vector<AuditViolation>& out, const Stream& s, int t,
            double amount, const std::vector<int>& subset) {
  for (auto& v : out)
    if (v.unit == s.unit && v.period == t) {
      if (amount > v.amount) {
        v.amount = amount;
        v.realization = subset;
      }
      return;
    }
  out.push_back({s.unit, s.family, t, amount, subset});
}

}  // namespace

AuditReport audit_robust_feasibility(const RvppSchedule& sc,
                                     const Portfolio& p,
                                     const MarketScenario& s,
                                     const BudgetSet& b,
                                     const AuditOptions& o) {
  const int T = s.grid.period_count;
  AuditReport rep;
  for (const Stream& st : streams(sc, p, b)) {
    if (st.gamma < 0 || st.gamma > T)
      throw std::invalid_argument("budget of '" + st.unit +
                                  "' outside the horizon");
    const std::uint64_t count = binomial(T, st.gamma);
    const bool exhaustive = !o.force_dominant && count <= o.exhaustive_cap;
    if (!exhaustive) {
      rep.exhaustive = false;
      ++rep.realizations;
      for (int t = 0; t < T; ++t) {
        double e = st.excess(t, st.gamma >= 1);
        if (e > o.tol) record(rep.violations, st, t, e, {});
      }
      continue;
    }
    rep.realizations += count;
    std::vector<int> subset(st.gamma);
    std::vector<char> in(T);
    for (std::uint64_t r = 0; r < count; ++r) {
      subset = unrank_subset(T, st.gamma, r);
      std::fill(in.begin(), in.end(), 0);
      for (int t : subset) in[t] = 1;
      for (int t = 0; t < T; ++t) {
        double e = st.excess(t, in[t] != 0);
        if (e > o.tol) record(rep.violations, st, t, e, subset);
      }
    }
  }

  // Uncertain parameters do not enter the balance, so one check covers every
  // realization.
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
    const std::pair<const char*, double> rows[] = {
        {"balance_up", up}, {"balance_dn", dn}, {"balance", none}};
    for (auto [family, v] : rows)
      if (std::fabs(v) > o.tol)
        rep.violations.push_back({"", family, t, std::fabs(v), {}});
  }
  return rep;
}

}  // namespace rvpp::oracle
