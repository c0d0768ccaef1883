#pragma once

// Technical data of the reference case study: one hydro plant, one biomass
// unit, a 50 MW wind farm, a 50 MW PV plant, a CSP plant with thermal store,
// a flexible demand, and 1 MWh Li-ion storage modules.
//
// Time series (forecasts, prices, demand profiles) are not part of this
// table; they come from a scenario file.

#include "rvpp/domain.hpp"

namespace rvpp::reference {

DrsUnit hydro();
DrsUnit biomass();
/// Capacity and cost only; forecasts must be filled in.
NdrsUnit wind();
NdrsUnit solar_pv();

/// Solar-field maximum thermal output, MW-thermal.
inline constexpr double kSolarFieldMax = 300.0;

/// Turbine, store and commitment data. The startup loss multiplier and the
/// turbine minimum output are not part of the reference table and stay 0;
/// callers must supply them.
CspUnit csp();

inline constexpr double kFlexibilityMargin = 0.10;

EsUnit es_module();

/// Daily hydro energy limits per season and regime, MWh.
SeasonalLimits hydro_energy_limits();

}  // namespace rvpp::reference
