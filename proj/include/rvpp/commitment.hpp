#pragma once

// Unit commitment logic shared by dispatchable units and CSP turbines:
// startup/shutdown logic plus minimum up/down times in the three-group form
// (initial periods, full windows, end-of-horizon windows).

#include <string>
#include <vector>

#include "rvpp/domain.hpp"
#include "rvpp/milp.hpp"

namespace rvpp {

struct CommitmentVars {
  std::vector<milp::VarId> u, v_su, v_sd;
};

/// Adds u(unit,t), v_su(unit,t), v_sd(unit,t) binaries and their constraints.
CommitmentVars add_commitment(milp::Model& model, const std::string& unit,
                              int periods, int min_up, int min_down,
                              const InitialCommitment& initial);

/// Linear scan of a commitment trajectory. Returns one message per broken
/// rule; empty means consistent.
std::vector<std::string> check_commitment(const std::vector<int>& u,
                                          const std::vector<int>& v_su,
                                          const std::vector<int>& v_sd,
                                          int min_up, int min_down,
                                          const InitialCommitment& initial);

}  // namespace rvpp
