#include "dhnet/hydraulics.hpp"

#include "dhnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dhnet {

void StationParams::validate(const std::string& path, std::vector<std::string>& errors) const {
    if (!(fluid_mass_kg > 0.0))
        errors.push_back(path + ".fluid_mass_kg: must be > 0");
    if (!(design_spread_k > 0.0))
        errors.push_back(path + ".design_spread_k: must be > 0");
}

double station_rhs(const StationParams& p, double specific_heat_j_kgk, double t_hhx_c,
                   double inlet_temp_c, double mdot_kg_s, double q_hhx_w) {
    return (mdot_kg_s * specific_heat_j_kgk * (inlet_temp_c - t_hhx_c) + q_hhx_w) /
           (p.fluid_mass_kg * specific_heat_j_kgk);
}

double station_mass_flow_kg_s(double specific_heat_j_kgk, double design_spread_k,
                              double q_hhx_w) {
    return std::abs(q_hhx_w) / (specific_heat_j_kgk * design_spread_k);
}

ValveSplit mixing_valve(double position, double mdot_network_kg_s, double t_storage_out_c,
                        double t_bypass_c) {
    ValveSplit s;
    s.mdot_storage_kg_s = position * mdot_network_kg_s;
    s.mdot_bypass_kg_s = mdot_network_kg_s - s.mdot_storage_kg_s;
    if (mdot_network_kg_s > 0.0) {
        s.supply_temp_c = (s.mdot_storage_kg_s * t_storage_out_c +
                           s.mdot_bypass_kg_s * t_bypass_c) /
                          mdot_network_kg_s;
    } else {
        s.supply_temp_c = t_bypass_c;
    }
    return s;
}

void ValveController::validate(const std::string& path,
                               std::vector<std::string>& errors) const {
    if (schedule.empty())
        errors.push_back(path + ".schedule: must not be empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& e = schedule[i];
        if (e.day_of_year < 0 || e.day_of_year >= 365)
            errors.push_back(path + ".schedule[" + std::to_string(i) +
                             "].day_of_year: must be in [0, 364]");
        if (i > 0 && schedule[i - 1].day_of_year >= e.day_of_year)
            errors.push_back(path + ".schedule[" + std::to_string(i) +
                             "].day_of_year: entries must be strictly increasing");
    }
    if (!(position >= 0.0 && position <= 1.0))
        errors.push_back(path + ".initial_position: must be in [0, 1]");
}

const SetpointEntry& schedule_entry(const ValveController& ctrl, double sim_time_s) {
    const double year_s = 365.0 * 86400.0;
    double t = std::fmod(ctrl.year_start_offset_s + sim_time_s, year_s);
    if (t < 0.0) t += year_s;
    const int day = static_cast<int>(t / 86400.0);
    // entries hold from their day until the next entry's day, wrapping
    const SetpointEntry* active = &ctrl.schedule.back();
    for (const auto& e : ctrl.schedule) {
        if (e.day_of_year <= day) active = &e;
    }
    return *active;
}

double pi_step(ValveController& ctrl, double measured_supply_c, double sim_time_s,
               double dt_s) {
    const SetpointEntry& entry = schedule_entry(ctrl, sim_time_s);
    double error = entry.setpoint_c - measured_supply_c;
    if (entry.mode == ControlMode::regeneration) error = -error;
    if (!ctrl.primed) {
        ctrl.prev_error_k = error;
        ctrl.primed = true;
    }
    const double delta = ctrl.gain_p * (error - ctrl.prev_error_k) + ctrl.gain_i * error * dt_s;
    ctrl.position = std::clamp(ctrl.position + delta, 0.0, 1.0);
    ctrl.prev_error_k = error;
    return ctrl.position;
}

double pump_power_w(double dp_total_pa, double mdot_network_kg_s, double density_kg_m3,
                    double efficiency) {
    if (!(efficiency > 0.0))
        throw std::invalid_argument("pump_power_w: efficiency must be > 0");
    return dp_total_pa * mdot_network_kg_s / (density_kg_m3 * efficiency);
}

std::vector<double> route_mass_flows(std::span<const int> parent,
                                     std::span<const double> station_flow_kg_s) {
    const int n = static_cast<int>(parent.size());
    std::vector<double> subtree(station_flow_kg_s.begin(), station_flow_kg_s.end());

    // children-before-parents order via depth sort; detects cycles and
    // out-of-range parents on the way
    std::vector<int> depth(n, -1);
    for (int v = 0; v < n; ++v) {
        int u = v;
        int steps = 0;
        while (u != -1 && depth[u] < 0) {
            if (++steps > n)
                throw ValidationError("network.runs: topology contains a cycle");
            if (parent[u] < -1 || parent[u] >= n)
                throw ValidationError("network.runs: parent index out of range");
            u = parent[u];
        }
        const int base = (u == -1) ? 0 : depth[u] + 1;
        // walk down again assigning depths
        int w = v;
        std::vector<int> chain;
        while (w != u) {
            chain.push_back(w);
            w = parent[w];
        }
        for (int k = static_cast<int>(chain.size()) - 1; k >= 0; --k)
            depth[chain[k]] = base + static_cast<int>(chain.size()) - 1 - k;
    }
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return depth[a] != depth[b] ? depth[a] > depth[b] : a < b;
    });
    for (int v : order) {
        if (parent[v] != -1) subtree[parent[v]] += subtree[v];
    }
    return subtree;
}

} // namespace dhnet
