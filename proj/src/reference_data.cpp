#include "rvpp/reference_data.hpp"

namespace rvpp::reference {

DrsUnit hydro() {
  DrsUnit u;
  u.name = "hydro";
  u.technology = Technology::hydro;
  u.p_max = 50.0;
  u.p_min = 10.0;
  u.startup_cost = 100.0;
  u.shutdown_cost = 50.0;
  u.op_cost = 12.5;
  u.min_up = 1;
  u.min_down = 0;
  u.daily_energy_limit = 1164.0;
  return u;
}

DrsUnit biomass() {
  DrsUnit u;
  u.name = "biomass";
  u.technology = Technology::biomass;
  u.p_max = 10.0;
  u.p_min = 2.0;
  u.startup_cost = 300.0;
  u.shutdown_cost = 150.0;
  u.op_cost = 60.0;
  u.min_up = 3;
  u.min_down = 3;
  // No seasonal cap: a full day at rated output.
  u.daily_energy_limit = 24.0 * u.p_max;
  return u;
}

NdrsUnit wind() {
  NdrsUnit u;
  u.name = "wind";
  u.technology = Technology::wind;
  u.op_cost = 15.0;
  return u;
}

NdrsUnit solar_pv() {
  NdrsUnit u;
  u.name = "pv";
  u.technology = Technology::solar_pv;
  u.op_cost = 10.0;
  return u;
}

CspUnit csp() {
  CspUnit u;
  u.name = "csp";
  u.turbine_p_max = 55.0;
  u.efficiency = 55.0 / 140.0;
  u.min_up = 3;
  u.min_down = 2;
  u.op_cost = 25.0;
  u.ts.e_max = 1100.0;
  u.ts.e_min = 110.0;
  u.ts.charge_p_max = 140.0;
  u.ts.discharge_p_max = 115.0;
  u.ts.charge_eff = 0.95;
  u.ts.discharge_eff = 0.95;
  return u;
}

EsUnit es_module() {
  EsUnit u;
  u.charge_p_max = 0.5;
  u.discharge_p_max = 0.5;
  u.e_max = 1.0;
  u.e_min = 0.1;
  u.charge_eff = 0.95;
  u.discharge_eff = 0.95;
  u.op_cost = 30.0;
  return u;
}

SeasonalLimits hydro_energy_limits() {
  return {
      {Season::winter, {1164.0, 804.0}},
      {Season::spring, {972.0, 624.0}},
      {Season::summer, {528.0, 420.0}},
      {Season::autumn, {708.0, 612.0}},
  };
}

}  // namespace rvpp::reference
