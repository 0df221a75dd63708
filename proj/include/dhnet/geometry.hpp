#pragma once

#include <vector>

namespace dhnet {

// One discretized pipe volume: inner radius, wall thickness, segment length.
struct PipeGeometry {
    double inner_radius_m = 0.0;
    double wall_thickness_m = 0.0;
    double length_m = 0.0;
};

// Cylinder / hollow-cylinder bulk quantities of one pipe segment.
struct PipeBulk {
    double flow_area_m2 = 0.0;    // A_f
    double fluid_volume_m3 = 0.0; // V_f
    double fluid_mass_kg = 0.0;   // m_f
    double inner_surface_m2 = 0.0;
    double wall_volume_m3 = 0.0;
    double wall_mass_kg = 0.0;
};

PipeBulk pipe_bulk(const PipeGeometry& g, double fluid_density_kg_m3,
                   double wall_density_kg_m3);

// Area of the circular segment cut off by a chord at height z from the rim,
// 0 <= z <= r. z = 0 gives 0, z = r gives the half disc.
double circular_segment_area(double radius_m, double height_m);

// Radial discretization of the soil around one pipe of a buried supply/return
// pair. half_spacing_m is HALF the center-to-center distance of the two
// pipes: a layer whose radius exceeds it intersects the partner pipe's
// mirror-image layer, and the intersection lens is carved out of the
// adjacent-section area. The sector split angle beta is fixed by the
// outermost layer's chord and applied to every layer.
struct SoilLayerProfile {
    int layer_count = 0;          // n_s
    double layer_thickness_m = 0; // delta_s
    double half_spacing_m = 0;    // r_b
    double segment_length_m = 0;  // l_p
    double beta_rad = 0;

    // index 0 is the pipe outer surface, index i the outer rim of layer i
    std::vector<double> radius_m;         // size n_s + 1
    std::vector<double> segment_height_m; // z, size n_s + 1
    std::vector<double> chord_m;          // size n_s + 1
    std::vector<double> arc_m;            // size n_s + 1

    // per layer, index 0 is layer 1
    std::vector<double> outer_area_m2;
    std::vector<double> adjacent_area_m2;
    std::vector<double> hollow_area_m2;
    std::vector<double> outer_factor;    // k_o
    std::vector<double> adjacent_factor; // k_a
    std::vector<double> outer_volume_m3;
    std::vector<double> adjacent_volume_m3;
};

// Throws std::invalid_argument when the pipes would overlap
// (half_spacing_m <= pipe outer radius) or the discretization is degenerate.
SoilLayerProfile soil_layer_profile(const PipeGeometry& g, int layer_count,
                                    double layer_thickness_m, double half_spacing_m);

} // namespace dhnet
