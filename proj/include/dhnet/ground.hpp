#pragma once

#include "dhnet/geometry.hpp"
#include "dhnet/properties.hpp"

#include <optional>
#include <span>
#include <vector>

namespace dhnet {

// Seasonal sinusoid of the uninfluenced soil temperature at the installation
// depth. year_start_offset_s is the elapsed time since the start of the year
// at simulation start; the year is taken as 8760 h.
struct BoundaryClimate {
    double min_temp_c = 5.9;
    double max_temp_c = 22.1;
    double year_start_offset_s = 0.0;
};

double boundary_temperature_c(const BoundaryClimate& climate, double sim_time_s);

enum class SoilSection { outer, adjacent };

// One supply/return soil column pair sharing a layer profile. The optional
// distances override the built-in defaults for the outer<->adjacent and
// supply<->return exchange paths. boundary_outer_only drops the boundary
// coupling of the adjacent chain's outermost layer. derive() precomputes the
// temperature-independent conductances and must run before any flow/rhs call.
struct SoilColumnParams {
    SoilLayerProfile profile;
    SoilProps soil;
    WaterConstants water;
    std::optional<double> outer_adjacent_distance_m;
    std::optional<double> supply_return_distance_m;
    bool boundary_outer_only = false;

    // derived, per layer (index 0 = layer 1); the last radial entry couples
    // the layer center to the outer rim where the boundary temperature sits
    std::vector<double> radial_cond_outer_w_k;
    std::vector<double> radial_cond_adjacent_w_k;
    std::vector<double> cross_cond_w_k;
    std::vector<double> pair_cond_w_k;

    void derive();
};

// Radial conduction between layer i and i+1 of one section (1-based i).
// For i == n_s the counterpart temperature is the boundary value.
double radial_layer_flow_w(const SoilColumnParams& p, int layer, SoilSection section,
                           double t_layer_c, double t_next_c);

// Exchange between the outer and adjacent sections of layer i across the
// chord-end strips. Positive from outer to adjacent.
double outer_adjacent_flow_w(const SoilColumnParams& p, int layer, double t_outer_c,
                             double t_adjacent_c);

// Default centroid-to-centroid distance used by outer_adjacent_flow_w.
double outer_adjacent_distance_m(const SoilColumnParams& p, int layer);

// Direct exchange between the supply-side and return-side adjacent layers
// through the intersection area. Zero while the layers do not intersect.
double supply_return_flow_w(const SoilColumnParams& p, int layer, double t_supply_c,
                            double t_return_c);

struct SoilPairState {
    std::span<const double> sup_outer;
    std::span<const double> sup_adjacent;
    std::span<const double> ret_outer;
    std::span<const double> ret_adjacent;
};

struct SoilPairRates {
    std::span<double> sup_outer;
    std::span<double> sup_adjacent;
    std::span<double> ret_outer;
    std::span<double> ret_adjacent;
};

struct SoilPairSummary {
    double boundary_outflow_w = 0.0;        // total flow leaving to the boundary
    double unapportioned_pipe_heat_w = 0.0; // pipe heat not captured by k_o1 + k_a1
};

// Energy balances of all 4*n_s layers of one segment's soil pair.
// pipe_heat_*_w is the wall-to-soil flow of the respective pipe, apportioned
// to the first outer/adjacent layers by their correction factors.
SoilPairSummary soil_pair_rhs(const SoilColumnParams& p, const SoilPairState& s,
                              double pipe_heat_supply_w, double pipe_heat_return_w,
                              double boundary_temp_c, const SoilPairRates& out);

// Annual thermal influence of precipitation, kWh/(m2 a). Documentation-only
// sanity figure; never enters the soil energy balances.
double precipitation_heat_input_kwh_m2a(double precipitation_kg_m2a, double c_water_j_kgk,
                                        double t_precipitation_c, double t_soil_c);

} // namespace dhnet
