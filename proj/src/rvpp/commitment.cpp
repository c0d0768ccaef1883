#include "rvpp/commitment.hpp"

#include <algorithm>
#include <cstdio>

namespace rvpp {

using milp::LinearExpr;
using milp::Sense;

namespace {
std::string idx(const std::string& unit, int t) {
  return "(" + unit + "," + std::to_string(t) + ")";
}
}  // namespace

CommitmentVars add_commitment(milp::Model& m, const std::string& unit, int T,
                              int min_up, int min_down,
                              const InitialCommitment& init) {
  CommitmentVars c;
  for (int t = 0; t < T; ++t) {
    c.u.push_back(m.add_binary("u" + idx(unit, t)));
    c.v_su.push_back(m.add_binary("v_su" + idx(unit, t)));
    c.v_sd.push_back(m.add_binary("v_sd" + idx(unit, t)));
  }
  const double u0 = init.online ? 1.0 : 0.0;
  for (int t = 0; t < T; ++t) {
    LinearExpr logic = LinearExpr(c.v_su[t]) - LinearExpr(c.v_sd[t]) -
                       LinearExpr(c.u[t]);
    if (t > 0) logic.add(c.u[t - 1], 1.0);
    m.add_constraint("commit_logic" + idx(unit, t), logic, Sense::eq,
                     t > 0 ? 0.0 : -u0);
    m.add_constraint("commit_single" + idx(unit, t),
                     LinearExpr(c.v_su[t]) + LinearExpr(c.v_sd[t]), Sense::le,
                     1.0);
  }

  // Minimum up time.
  if (min_up > 1 || (init.online && init.periods_remaining > 0)) {
    int G = init.online ? std::min(T, init.periods_remaining) : 0;
    for (int t = 0; t < G; ++t)
      m.add_constraint("min_up_init" + idx(unit, t), LinearExpr(c.u[t]),
                       Sense::eq, 1.0);
    if (min_up > 1) {
      for (int t = G; t <= T - min_up; ++t) {
        LinearExpr e;
        for (int n = t; n < t + min_up; ++n) e.add(c.u[n], 1.0);
        e.add(c.v_su[t], -static_cast<double>(min_up));
        m.add_constraint("min_up" + idx(unit, t), e, Sense::ge, 0.0);
      }
      for (int t = std::max(G, T - min_up + 1); t < T; ++t) {
        LinearExpr e;
        for (int n = t; n < T; ++n) {
          e.add(c.u[n], 1.0);
          e.add(c.v_su[t], -1.0);
        }
        m.add_constraint("min_up_end" + idx(unit, t), e, Sense::ge, 0.0);
      }
    }
  }

  // Minimum down time.
  if (min_down > 1 || (!init.online && init.periods_remaining > 0)) {
    int L = init.online ? 0 : std::min(T, init.periods_remaining);
    for (int t = 0; t < L; ++t)
      m.add_constraint("min_down_init" + idx(unit, t), LinearExpr(c.u[t]),
                       Sense::eq, 0.0);
    if (min_down > 1) {
      for (int t = L; t <= T - min_down; ++t) {
        LinearExpr e;
        for (int n = t; n < t + min_down; ++n) e.add(c.u[n], -1.0);
        e.add(c.v_sd[t], -static_cast<double>(min_down));
        m.add_constraint("min_down" + idx(unit, t), e, Sense::ge,
                         -static_cast<double>(min_down));
      }
      for (int t = std::max(L, T - min_down + 1); t < T; ++t) {
        LinearExpr e;
        for (int n = t; n < T; ++n) {
          e.add(c.u[n], -1.0);
          e.add(c.v_sd[t], -1.0);
        }
        m.add_constraint("min_down_end" + idx(unit, t), e, Sense::ge,
                         -static_cast<double>(T - t));
      }
    }
  }
  return c;
}

std::vector<std::string> check_commitment(const std::vector<int>& u,
                                          const std::vector<int>& v_su,
                                          const std::vector<int>& v_sd,
                                          int min_up, int min_down,
                                          const InitialCommitment& init) {
  std::vector<std::string> out;
  char buf[160];
  const int T = static_cast<int>(u.size());
  if (static_cast<int>(v_su.size()) != T || static_cast<int>(v_sd.size()) != T)
    return {"commitment vectors differ in length"};
  int prev = init.online ? 1 : 0;
  for (int t = 0; t < T; ++t) {
    if (v_su[t] - v_sd[t] != u[t] - prev) {
      std::snprintf(buf, sizeof buf, "startup/shutdown flags disagree with "
                    "status change at period %d", t);
      out.emplace_back(buf);
    }
    if (v_su[t] && v_sd[t]) {
      std::snprintf(buf, sizeof buf, "start and stop in period %d", t);
      out.emplace_back(buf);
    }
    prev = u[t];
  }

  // Run lengths. The initial run counts only its residual obligation.
  if (init.online) {
    for (int t = 0; t < std::min(T, init.periods_remaining); ++t)
      if (!u[t]) {
        std::snprintf(buf, sizeof buf,
                      "initial up obligation broken at period %d", t);
        out.emplace_back(buf);
        break;
      }
  } else {
    for (int t = 0; t < std::min(T, init.periods_remaining); ++t)
      if (u[t]) {
        std::snprintf(buf, sizeof buf,
                      "initial down obligation broken at period %d", t);
        out.emplace_back(buf);
        break;
      }
  }
  for (int t = 0; t < T; ++t) {
    if (v_su[t] && min_up > 1) {
      int end = std::min(T, t + min_up);
      for (int n = t; n < end; ++n)
        if (!u[n]) {
          std::snprintf(buf, sizeof buf,
                        "unit started at %d went down at %d before its "
                        "minimum up time %d",
                        t, n, min_up);
          out.emplace_back(buf);
          break;
        }
    }
    if (v_sd[t] && min_down > 1) {
      int end = std::min(T, t + min_down);
      for (int n = t; n < end; ++n)
        if (u[n]) {
          std::snprintf(buf, sizeof buf,
                        "unit stopped at %d came back at %d before its "
                        "minimum down time %d",
                        t, n, min_down);
          out.emplace_back(buf);
          break;
        }
    }
  }
  return out;
}

}  // namespace rvpp
