#pragma once

#include "dhnet/geometry.hpp"
#include "dhnet/ground.hpp"
#include "dhnet/hydraulics.hpp"
#include "dhnet/icestore.hpp"
#include "dhnet/pipe.hpp"
#include "dhnet/properties.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dhnet {

// One buried supply/return pipe pair between two nodes. Geometry and soil
// parameters apply per discretized segment; a run of length_m is split into
// ceil(length_m / target_segment_length_m) equal segments.
struct PipeRunConfig {
    std::string id;
    std::string from_node;
    std::string to_node;
    double length_m = 0.0;
    double inner_radius_m = 0.05;
    double wall_thickness_m = 0.01;
    double wall_density_kg_m3 = 940.0;
    double wall_specific_heat_j_kgk = 1900.0;
    double wall_conductivity_w_mk = 0.4;
    double fluid_wall_htc_w_m2k = 500.0;
    double target_segment_length_m = 25.0;
    int soil_layer_count = 3;
    double soil_layer_thickness_m = 0.3;
    double half_spacing_m = 0.35; // half the supply/return center distance
    std::optional<double> outer_adjacent_distance_m;
    std::optional<double> supply_return_distance_m;
    bool boundary_outer_only = false;
};

struct ConsumerConfig {
    std::string id;
    std::string node;
    StationParams station;
    std::string demand_key; // series id in the demand CSV
};

struct ControllerConfig {
    double gain_p = 0.05;
    double gain_i = 1e-4;
    double initial_position = 0.0;
    std::vector<SetpointEntry> schedule;
    // optional operator override of the valve position; value unset releases
    // back to the PI controller
    std::vector<std::pair<double, std::optional<double>>> position_overrides;
};

struct PumpConfig {
    double efficiency = 0.7;
    std::optional<double> constant_flow_kg_s;
};

enum class IntegratorMethod { explicit_euler, rk4, adaptive_rk45 };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk4;
    double dt_s = 60.0;
    double rel_tol = 1e-6;
    double abs_tol = 1e-8;
    double output_interval_s = 60.0;
    double duration_s = 86400.0;
};

struct InitialConditions {
    std::optional<double> network_temp_c;  // fluid, walls, stations
    std::optional<double> storage_temp_c;  // water and concrete
    // per-layer override for all pipe soil columns (outer and adjacent alike)
    std::optional<std::vector<double>> pipe_soil_layer_temps_c;
};

struct Scenario {
    FluidProps fluid;
    SoilProps soil;
    WaterConstants water;
    BoundaryClimate climate;
    std::vector<std::string> nodes; // first entry is the root / storage junction
    std::vector<PipeRunConfig> runs;
    std::vector<ConsumerConfig> consumers;
    IceStorageParams storage;
    double storage_initial_temp_c = 8.0;
    ControllerConfig controller;
    PumpConfig pump;
    IntegratorConfig integrator;
    InitialConditions initial;
    std::string demands_file; // optional, resolved relative to the scenario file
};

// Parses and validates a scenario JSON file. Collects every validation
// problem (with its config field path) before throwing ValidationError.
Scenario load_scenario(const std::string& path);

// Same validation pass for scenarios built in code.
void validate_scenario(const Scenario& scenario, std::vector<std::string>& errors);

} // namespace dhnet
