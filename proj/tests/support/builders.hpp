#pragma once

#include "dhnet/scenario.hpp"
#include "dhnet/timeseries.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace dhnet::testing {

inline FluidProps brine() {
    FluidProps f;
    f.density_kg_m3 = 1045.0;
    f.specific_heat_j_kgk = 3800.0;
    f.viscosity_table = {{-10.0, 0.012},
                         {0.0, 0.008},
                         {10.0, 0.0055},
                         {20.0, 0.004},
                         {30.0, 0.003}};
    return f;
}

inline SoilProps loam() {
    SoilProps s;
    s.density_kg_m3 = 1800.0;
    s.dry_specific_heat_j_kgk = 840.0;
    s.conductivity_w_mk = 1.5;
    s.water_share = 0.15;
    return s;
}

inline PipeRunConfig run_between(const std::string& id, const std::string& from,
                                 const std::string& to, double length_m) {
    PipeRunConfig r;
    r.id = id;
    r.from_node = from;
    r.to_node = to;
    r.length_m = length_m;
    r.inner_radius_m = 0.05;
    r.wall_thickness_m = 0.01;
    r.soil_layer_count = 2;
    r.soil_layer_thickness_m = 0.3;
    r.half_spacing_m = 0.4; // first soil layer clear of the partner pipe
    return r;
}

// Storage + one 25 m run + one consumer; the smallest assemblable network.
inline Scenario minimal_scenario() {
    Scenario s;
    s.fluid = brine();
    s.soil = loam();
    s.climate = {5.9, 22.1, 334.0 * 86400.0}; // start on Dec 1
    s.nodes = {"root", "house"};
    s.runs = {run_between("main", "root", "house", 25.0)};

    ConsumerConfig c;
    c.id = "house1";
    c.node = "house";
    c.station = {50.0, 3.0};
    c.demand_key = "house1";
    s.consumers = {c};

    s.storage.water_radius_m = 1.5;
    s.storage.water_volume_m3 = 20.0;
    s.storage.layer_count = 2;
    s.storage.coil_count = 2;
    s.storage.coil_length_m = 600.0;
    s.storage.soil_layer_count = 2;
    s.storage.soil_layer_thickness_m = 0.5;
    s.storage.soil = s.soil;
    s.storage.water = s.water;
    s.storage_initial_temp_c = 10.0;

    s.controller.gain_p = 0.05;
    s.controller.gain_i = 1e-4;
    s.controller.initial_position = 0.0;
    s.controller.schedule = {{120, 16.0, ControlMode::regeneration},
                             {273, 4.0, ControlMode::heating}};

    s.integrator.method = IntegratorMethod::rk4;
    s.integrator.dt_s = 60.0;
    s.integrator.output_interval_s = 60.0;
    s.integrator.duration_s = 3600.0;
    return s;
}

// Trunk to a junction, two branches, two consumers.
inline Scenario two_branch_scenario() {
    Scenario s = minimal_scenario();
    s.nodes = {"root", "junction", "east", "west"};
    s.runs = {run_between("trunk", "root", "junction", 120.0),
              run_between("east", "junction", "east", 60.0),
              run_between("west", "junction", "west", 80.0)};
    s.consumers.clear();
    for (const char* name : {"east", "west"}) {
        ConsumerConfig c;
        c.id = std::string(name) + "_house";
        c.node = name;
        c.station = {60.0, 3.0};
        c.demand_key = c.id;
        s.consumers.push_back(c);
    }
    s.storage.layer_count = 4;
    s.storage.water_volume_m3 = 50.0;
    s.storage.water_radius_m = 2.0;
    s.storage.coil_length_m = 1200.0;
    s.storage.soil_layer_count = 3;
    return s;
}

// Hourly sampled series built from a function of time.
inline StepSeries sampled_series(double duration_s, double step_s,
                                 const std::function<double(double)>& fn) {
    StepSeries s;
    for (double t = 0.0; t <= duration_s + step_s; t += step_s) {
        s.time_s.push_back(t);
        s.value.push_back(fn(t));
    }
    return s;
}

// Five consumers on two junctions; station masses and spreads sized so the
// fastest advection time constants stay well above a 60 s step.
inline Scenario five_consumer_scenario() {
    Scenario s = minimal_scenario();
    s.nodes = {"root", "j1", "j2", "h1", "h2", "h3", "h4", "h5"};
    s.runs = {run_between("trunk", "root", "j1", 100.0),
              run_between("mid", "j1", "j2", 75.0),
              run_between("r1", "j1", "h1", 50.0),
              run_between("r2", "j1", "h2", 60.0),
              run_between("r3", "j2", "h3", 40.0),
              run_between("r4", "j2", "h4", 55.0),
              run_between("r5", "j2", "h5", 65.0)};
    for (auto& run : s.runs) {
        run.soil_layer_count = 3;
        run.inner_radius_m = (run.id == "trunk" || run.id == "mid") ? 0.06 : 0.05;
    }
    s.consumers.clear();
    for (int i = 1; i <= 5; ++i) {
        ConsumerConfig c;
        c.id = "h" + std::to_string(i);
        c.node = c.id;
        c.station = {120.0, 4.0};
        c.demand_key = c.id;
        s.consumers.push_back(c);
    }
    s.storage.water_radius_m = 4.0;
    s.storage.water_volume_m3 = 300.0;
    s.storage.layer_count = 4;
    s.storage.coil_count = 4;
    s.storage.coil_length_m = 2500.0;
    s.storage.soil_layer_count = 3;
    s.storage.soil_layer_thickness_m = 0.5;
    s.storage_initial_temp_c = 12.0;
    s.integrator.output_interval_s = 600.0;
    return s;
}

// Winter-dominant heating with summer cooling injections, sampled hourly.
// Positive values mean the network supplies heat to the building.
inline DemandSet seasonal_demands(double duration_s, double year_start_offset_s,
                                  const std::vector<std::string>& ids,
                                  double heat_scale = 1.0, double cool_scale = 1.0) {
    DemandSet set;
    const double heat_kw[] = {5.0, 7.0, 4.0, 6.0, 5.0};
    const double cool_kw[] = {4.0, 5.0, 3.0, 4.5, 4.0};
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const double a = heat_kw[k % 5] * 1000.0 * heat_scale;
        const double b = cool_kw[k % 5] * 1000.0 * cool_scale;
        set.series[ids[k]] = sampled_series(duration_s, 3600.0, [=](double t) {
            const double doy = std::fmod((year_start_offset_s + t) / 86400.0, 365.0);
            const double hour = std::fmod(t / 3600.0, 24.0);
            const double winter = std::max(0.0, std::cos(2.0 * M_PI * (doy - 15.0) / 365.0));
            const double summer = std::max(0.0, std::cos(2.0 * M_PI * (doy - 196.0) / 365.0));
            const double diurnal = 1.0 + 0.3 * std::sin(2.0 * M_PI * (hour - 18.0) / 24.0);
            return a * winter * diurnal - b * summer * diurnal;
        });
    }
    return set;
}

// Constant demand per consumer, held over the whole horizon.
inline DemandSet constant_demands(const std::vector<std::pair<std::string, double>>& q_w) {
    DemandSet set;
    for (const auto& [id, q] : q_w) {
        StepSeries series;
        series.time_s = {0.0, 1e12};
        series.value = {q, q};
        set.series[id] = series;
    }
    return set;
}

} // namespace dhnet::testing
