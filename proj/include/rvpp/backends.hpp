#pragma once

// HiGHS adapters for the milp::SolverBackend interface.
//
//   highs     structural handoff (column/row arrays)
//   highs-lp  export_lp_text -> temporary .lp file -> HiGHS LP reader

#include <string>
#include <string_view>
#include <vector>

#include "rvpp/milp.hpp"

namespace rvpp {

struct HighsSettings {
  double mip_rel_gap = 1e-9;
  double mip_abs_gap = 1e-7;
  double time_limit = 600.0;  // seconds per solve
};

std::unique_ptr<milp::SolverBackend> make_highs_backend(
    const HighsSettings& settings = {});
std::unique_ptr<milp::SolverBackend> make_highs_lp_backend(
    const HighsSettings& settings = {});

std::vector<std::string> backend_names();

/// Throws std::invalid_argument for an unknown name.
milp::BackendFactory backend_factory(std::string_view name,
                                     const HighsSettings& settings = {});

/// $RVPP_BACKEND when set and non-empty, otherwise "highs".
std::string default_backend_name();

}  // namespace rvpp
