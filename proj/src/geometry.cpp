#include "dhnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dhnet {

namespace {
constexpr double kPi = std::numbers::pi;

double clamped_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }
} // namespace

PipeBulk pipe_bulk(const PipeGeometry& g, double fluid_density_kg_m3,
                   double wall_density_kg_m3) {
    PipeBulk b;
    b.flow_area_m2 = kPi * g.inner_radius_m * g.inner_radius_m;
    b.fluid_volume_m3 = b.flow_area_m2 * g.length_m;
    b.fluid_mass_kg = fluid_density_kg_m3 * b.fluid_volume_m3;
    b.inner_surface_m2 = 2.0 * kPi * g.inner_radius_m * g.length_m;
    const double r_out = g.inner_radius_m + g.wall_thickness_m;
    b.wall_volume_m3 = kPi * (r_out * r_out - g.inner_radius_m * g.inner_radius_m) * g.length_m;
    b.wall_mass_kg = wall_density_kg_m3 * b.wall_volume_m3;
    return b;
}

double circular_segment_area(double radius_m, double height_m) {
    if (height_m <= 0.0) return 0.0;
    const double chord = 2.0 * std::sqrt(std::max(
        2.0 * radius_m * height_m - height_m * height_m, 0.0));
    return radius_m * radius_m * clamped_asin(chord / (2.0 * radius_m)) -
           chord * (radius_m - height_m) / 2.0;
}

SoilLayerProfile soil_layer_profile(const PipeGeometry& g, int layer_count,
                                    double layer_thickness_m, double half_spacing_m) {
    if (layer_count < 1)
        throw std::invalid_argument("soil_layer_profile: layer_count must be >= 1");
    if (!(layer_thickness_m > 0.0))
        throw std::invalid_argument("soil_layer_profile: layer_thickness_m must be > 0");
    const double r0 = g.inner_radius_m + g.wall_thickness_m;
    if (!(half_spacing_m > r0))
        throw std::invalid_argument(
            "soil_layer_profile: half_spacing_m must exceed the pipe outer radius "
            "(pipes would overlap)");

    SoilLayerProfile p;
    p.layer_count = layer_count;
    p.layer_thickness_m = layer_thickness_m;
    p.half_spacing_m = half_spacing_m;
    p.segment_length_m = g.length_m;

    const int n = layer_count;
    p.radius_m.resize(n + 1);
    p.segment_height_m.resize(n + 1);
    p.chord_m.resize(n + 1);
    p.arc_m.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = r0 + i * layer_thickness_m;
        const double z = std::max(r - half_spacing_m, 0.0);
        const double chord = 2.0 * std::sqrt(std::max(2.0 * r * z - z * z, 0.0));
        p.radius_m[i] = r;
        p.segment_height_m[i] = z;
        p.chord_m[i] = chord;
        p.arc_m[i] = 2.0 * r * clamped_asin(chord / (2.0 * r));
    }

    // sector angle from the outermost layer, shared by all layers
    p.beta_rad = 2.0 * clamped_asin(p.chord_m[n] / (2.0 * p.radius_m[n]));
    const double adj_frac = p.beta_rad / (2.0 * kPi);
    const double out_frac = 1.0 - adj_frac;

    p.outer_area_m2.resize(n);
    p.adjacent_area_m2.resize(n);
    p.hollow_area_m2.resize(n);
    p.outer_factor.resize(n);
    p.adjacent_factor.resize(n);
    p.outer_volume_m3.resize(n);
    p.adjacent_volume_m3.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double ri = p.radius_m[i];
        const double rp = p.radius_m[i - 1];
        const double hollow = kPi * (ri * ri - rp * rp);
        const double lens_i = circular_segment_area(ri, p.segment_height_m[i]);
        const double lens_p = circular_segment_area(rp, p.segment_height_m[i - 1]);
        const double outer = hollow * out_frac;
        const double adjacent = (kPi * ri * ri * adj_frac - lens_i) -
                                (kPi * rp * rp * adj_frac - lens_p);
        p.hollow_area_m2[i - 1] = hollow;
        p.outer_area_m2[i - 1] = outer;
        p.adjacent_area_m2[i - 1] = adjacent;
        p.outer_factor[i - 1] = outer / hollow;
        p.adjacent_factor[i - 1] = adjacent / hollow;
        p.outer_volume_m3[i - 1] = outer * g.length_m;
        p.adjacent_volume_m3[i - 1] = adjacent * g.length_m;
    }
    return p;
}

} // namespace dhnet
