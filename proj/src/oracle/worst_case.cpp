#include <algorithm>
#include <stdexcept>

#include "rvpp/oracle.hpp"

namespace rvpp::oracle {

const StreamRealization* Realization::find(std::string_view stream) const {
  for (const auto& s : streams)
    if (s.stream == stream) return &s;
  return nullptr;
}

std::vector<double> dam_losses(const std::vector<double>& sell,
                               const std::vector<double>& buy,
                               const MarketScenario& s) {
  std::vector<double> loss(sell.size());
  for (std::size_t t = 0; t < sell.size(); ++t)
    loss[t] = s.dam_price_down_dev[t] * sell[t] + s.dam_price_up_dev[t] * buy[t];
  return loss;
}

namespace {

SubsetPick pick(const std::vector<double>& loss, int gamma, SubsetSearch how) {
  if (gamma < 0 || gamma > static_cast<int>(loss.size()))
    throw std::invalid_argument("budget " + std::to_string(gamma) +
                                " exceeds the horizon of " +
                                std::to_string(loss.size()) + " periods");
  return how == SubsetSearch::greedy ? greedy_top(loss, gamma)
                                     : exhaustive_top_serial(loss, gamma);
}

StreamRealization price_stream(std::string name, int gamma,
                               const std::vector<double>& loss,
                               const std::vector<double>& nominal,
                               const std::vector<double>& drop,
                               const std::vector<double>* rise,
                               const std::vector<double>* buy,
                               SubsetSearch how) {
  SubsetPick p = pick(loss, gamma, how);
  StreamRealization r;
  r.stream = std::move(name);
  r.gamma = gamma;
  r.periods = p.periods;
  r.loss = p.value;
  r.induced = nominal;
  for (int t : p.periods) {
    bool buying = rise && buy && (*buy)[t] > 0.0;
    r.induced[t] = buying ? nominal[t] + (*rise)[t] : nominal[t] - drop[t];
  }
  return r;
}

// Generation streams do not move profit once the schedule is fixed; they are
// reported with the largest-deviation subset for reference.
void add_unit_streams(Realization& out, const Portfolio& p,
                      const BudgetSet& b) {
  auto add = [&](const std::string& name, const std::vector<double>& bound,
                 const std::vector<double>& dev, double sign) {
    int g = b.unit(name);
    SubsetPick k = greedy_top(dev, std::min<int>(g, dev.size()));
    StreamRealization r;
    r.stream = name;
    r.gamma = g;
    r.periods = k.periods;
    r.induced = bound;
    for (int t : k.periods) r.induced[t] += sign * dev[t];
    out.streams.push_back(std::move(r));
  };
  for (const auto& u : p.ndrs)
    add(u.name, u.forecast_upper, u.forecast_deviation, -1.0);
  for (const auto& u : p.csp)
    add(u.name, u.sf_thermal_upper, u.sf_thermal_deviation, -1.0);
  for (const auto& u : p.fd)
    add(u.name, std::vector<double>(u.demand_upward_deviation.size(), 0.0),
        u.demand_upward_deviation, 1.0);
}

WorstCase evaluate(double nominal, const std::vector<double>& sell,
                   const std::vector<double>& buy,
                   const std::vector<double>& r_up,
                   const std::vector<double>& r_dn, const MarketScenario& s,
                   const BudgetSet& b, SubsetSearch how) {
  const int T = s.grid.period_count;
  if (static_cast<int>(sell.size()) != T)
    throw std::invalid_argument("schedule and scenario disagree on periods");
  std::vector<double> up(T), dn(T);
  for (int t = 0; t < T; ++t) {
    up[t] = s.srm_up_price_dev[t] * r_up[t];
    dn[t] = s.srm_down_price_dev[t] * r_dn[t];
  }
  WorstCase w;
  w.nominal = nominal;
  auto& st = w.realization.streams;
  st.push_back(price_stream("dam", b.gamma_dam, dam_losses(sell, buy, s),
                            s.dam_price_median, s.dam_price_down_dev,
                            &s.dam_price_up_dev, &buy, how));
  st.push_back(price_stream("sr_up", b.gamma_sr_up, up, s.srm_up_price_nominal,
                            s.srm_up_price_dev, nullptr, nullptr, how));
  st.push_back(price_stream("sr_down", b.gamma_sr_down, dn,
                            s.srm_down_price_nominal, s.srm_down_price_dev,
                            nullptr, nullptr, how));
  w.profit = nominal;
  for (const auto& r : st) w.profit -= r.loss;
  return w;
}

}  // namespace

WorstCase worst_case_profit(const RvppSchedule& sc, const Portfolio& p,
                            const MarketScenario& s, const BudgetSet& b,
                            SubsetSearch how) {
  const int T = s.grid.period_count;
  std::vector<double> sell(T), buy(T);
  for (int t = 0; t < T; ++t) {
    double e = sc.p_da[t] * s.grid.delta_t;
    sell[t] = std::max(e, 0.0);
    buy[t] = std::max(-e, 0.0);
  }
  WorstCase w = evaluate(rvpp_nominal_profit(sc, p, s), sell, buy, sc.r_sr_up,
                         sc.r_sr_dn, s, b, how);
  add_unit_streams(w.realization, p, b);
  return w;
}

WorstCase worst_case_profit(const EsSchedule& sc, const EsFleet& f,
                            const MarketScenario& s, const BudgetSet& b,
                            SubsetSearch how) {
  const int T = s.grid.period_count;
  std::vector<double> sell(T), buy(T);
  for (int t = 0; t < T; ++t) {
    sell[t] = sc.p_dis[t] * s.grid.delta_t;
    buy[t] = sc.p_ch[t] * s.grid.delta_t;
  }
  return evaluate(es_nominal_profit(sc, f, s), sell, buy, sc.r_up, sc.r_dn, s,
                  b, how);
}

}  // namespace rvpp::oracle
