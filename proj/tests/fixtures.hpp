#pragma once

// Small hand-built portfolios and markets shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rvpp/backends.hpp"
#include "rvpp/domain.hpp"
#include "rvpp/reference_data.hpp"

namespace fixtures {

using namespace rvpp;

inline MarketScenario flat_market(int T, double price = 50.0) {
  MarketScenario s;
  s.grid.period_count = T;
  s.dam_price_median.assign(T, price);
  s.dam_price_down_dev.assign(T, 0.0);
  s.dam_price_up_dev.assign(T, 0.0);
  s.srm_up_price_nominal.assign(T, 0.0);
  s.srm_down_price_nominal.assign(T, 0.0);
  s.srm_up_price_dev.assign(T, 0.0);
  s.srm_down_price_dev.assign(T, 0.0);
  s.season = Season::winter;
  return s;
}

inline NdrsUnit flat_ndrs(int T, double level, double dev, double cost) {
  NdrsUnit u = reference::wind();
  u.op_cost = cost;
  u.forecast_upper.assign(T, level);
  u.forecast_deviation.assign(T, dev);
  return u;
}

/// 24 hourly prices with a morning and an evening peak.
inline MarketScenario day_market() {
  const int T = 24;
  MarketScenario s = flat_market(T);
  for (int t = 0; t < T; ++t) {
    double h = t;
    double price = 45.0 + 25.0 * std::exp(-std::pow((h - 8.0) / 2.5, 2)) +
                   40.0 * std::exp(-std::pow((h - 20.0) / 2.5, 2)) -
                   15.0 * std::exp(-std::pow((h - 14.0) / 3.0, 2));
    s.dam_price_median[t] = price;
    s.dam_price_down_dev[t] = 0.12 * price;
    s.dam_price_up_dev[t] = 0.10 * price;
    s.srm_up_price_nominal[t] = 8.0 + 0.1 * price;
    s.srm_down_price_nominal[t] = 6.0 + 0.05 * price;
    s.srm_up_price_dev[t] = 0.2 * s.srm_up_price_nominal[t];
    s.srm_down_price_dev[t] = 0.2 * s.srm_down_price_nominal[t];
  }
  return s;
}

inline std::vector<double> bell(int T, double peak, double centre,
                                double width) {
  std::vector<double> v(T);
  for (int t = 0; t < T; ++t) {
    double x = (t - centre) / width;
    v[t] = std::abs(x) < 1.0 ? peak * (1.0 - x * x) : 0.0;
  }
  return v;
}

inline FdUnit three_profile_fd(int T) {
  FdUnit d;
  d.name = "fd";
  std::vector<double> flat(T, 20.0), morning(T, 16.0), evening(T, 16.0);
  for (int t = 6; t < 12 && t < T; ++t) morning[t] = 32.0;
  for (int t = 17; t < 23 && t < T; ++t) evening[t] = 32.0;
  d.profiles = {flat, morning, evening};
  d.flexibility_margin = reference::kFlexibilityMargin;
  d.p_min = 16.0 * (1.0 - d.flexibility_margin);
  d.p_max = 32.0 * (1.0 + d.flexibility_margin);
  d.demand_upward_deviation.assign(T, 1.0);
  return d;
}

/// The reference unit set on a 24-hour synthetic day.
inline Portfolio day_portfolio() {
  const int T = 24;
  Portfolio p;
  p.drs.push_back(reference::hydro());
  p.drs.push_back(reference::biomass());
  NdrsUnit w = reference::wind();
  NdrsUnit pv = reference::solar_pv();
  for (int t = 0; t < T; ++t) {
    double up = 25.0 + 12.0 * std::cos(2.0 * M_PI * (t - 3) / 24.0);
    w.forecast_upper.push_back(up);
    w.forecast_deviation.push_back(0.3 * up);
  }
  pv.forecast_upper = bell(T, 45.0, 13.0, 7.0);
  for (double x : pv.forecast_upper) pv.forecast_deviation.push_back(0.25 * x);
  p.ndrs = {w, pv};
  CspUnit c = reference::csp();
  c.startup_loss_mult = 0.5;
  c.turbine_p_min = 11.0;
  c.sf_thermal_upper = bell(T, reference::kSolarFieldMax, 13.0, 7.0);
  for (double x : c.sf_thermal_upper) c.sf_thermal_deviation.push_back(0.2 * x);
  p.csp.push_back(c);
  p.fd.push_back(three_profile_fd(T));
  return p;
}

inline milp::BackendFactory backend() {
  return backend_factory(default_backend_name());
}

}  // namespace fixtures
