#pragma once

#include <span>
#include <string>
#include <vector>

namespace dhnet {

// Primary side of one consumer transfer station. q_hhx_w follows the state
// equation's sign: positive means the building injects heat into the
// network side (demand series are negated on ingestion accordingly).
struct StationParams {
    double fluid_mass_kg = 50.0; // m_hhx
    double design_spread_k = 3.0; // delta T across the station

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

double station_rhs(const StationParams& p, double specific_heat_j_kgk, double t_hhx_c,
                   double inlet_temp_c, double mdot_kg_s, double q_hhx_w);

// Flow drawn by a station running at its design temperature spread.
double station_mass_flow_kg_s(double specific_heat_j_kgk, double design_spread_k,
                              double q_hhx_w);

struct ValveSplit {
    double mdot_storage_kg_s = 0.0;
    double mdot_bypass_kg_s = 0.0;
    double supply_temp_c = 0.0;
};

// Three-way mixing valve ahead of the storage. y = 1 routes everything
// through the storage. With zero network flow the supply temperature is
// defined as the bypass temperature.
ValveSplit mixing_valve(double position, double mdot_network_kg_s, double t_storage_out_c,
                        double t_bypass_c);

enum class ControlMode { heating, regeneration };

struct SetpointEntry {
    int day_of_year = 0; // 0-based day the entry takes effect, wraps around the year
    double setpoint_c = 0.0;
    ControlMode mode = ControlMode::heating;
};

// Velocity-form PI controller of the valve position: the output increment is
// K_p * (e - e_prev) + K_i * e * dt, clamped to [0, 1]. The tracking error is
// setpoint minus measured supply temperature in heating mode and its negation
// in regeneration mode.
struct ValveController {
    double gain_p = 0.05;  // per K
    double gain_i = 1e-4;  // per (K s)
    std::vector<SetpointEntry> schedule;
    double year_start_offset_s = 0.0;

    double position = 0.0;
    double prev_error_k = 0.0;
    bool primed = false;

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

// Active schedule entry at simulation time t (365-day year).
const SetpointEntry& schedule_entry(const ValveController& ctrl, double sim_time_s);

// One sampled controller update; returns the new valve position.
double pi_step(ValveController& ctrl, double measured_supply_c, double sim_time_s,
               double dt_s);

// Electric power of the circulation pump. Throws std::invalid_argument for a
// non-positive efficiency.
double pump_power_w(double dp_total_pa, double mdot_network_kg_s, double density_kg_m3,
                    double efficiency);

// Mass-flow routing over a tree given by parent indices (-1 for the root).
// station_flow_kg_s holds each node's locally drawn flow; the result holds
// each node's subtree total, i.e. the flow through the edge into that node.
// Throws ValidationError when the parent array does not describe a tree.
std::vector<double> route_mass_flows(std::span<const int> parent,
                                     std::span<const double> station_flow_kg_s);

} // namespace dhnet
