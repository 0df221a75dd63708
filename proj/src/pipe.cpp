#include "dhnet/pipe.hpp"

#include <cmath>
#include <numbers>

namespace dhnet {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PipeSegmentParams::derive(double fluid_density_kg_m3) {
    const PipeBulk b = pipe_bulk(geometry, fluid_density_kg_m3, wall_density_kg_m3);
    fluid_mass_kg = b.fluid_mass_kg;
    wall_mass_kg = b.wall_mass_kg;
    flow_area_m2 = b.flow_area_m2;
    const double r = geometry.inner_radius_m;
    const double resistance =
        1.0 / (r * fluid_wall_htc_w_m2k) +
        std::log((r + geometry.wall_thickness_m / 2.0) / r) / wall_conductivity_w_mk;
    fluid_wall_cond_w_k = 2.0 * kPi * geometry.length_m / resistance;
}

double fluid_wall_heat_flow_w(const PipeSegmentParams& p, double t_fluid_c,
                              double t_wall_c) {
    return p.fluid_wall_cond_w_k * (t_fluid_c - t_wall_c);
}

double pipe_soil_conductance_w_k(const PipeSegmentParams& p, double soil_layer_thickness_m,
                                 double soil_conductivity_w_mk) {
    const double r = p.geometry.inner_radius_m;
    const double d = p.geometry.wall_thickness_m;
    const double resistance =
        std::log((r + d) / (r + d / 2.0)) / p.wall_conductivity_w_mk +
        std::log((r + d + soil_layer_thickness_m / 2.0) / (r + d)) / soil_conductivity_w_mk;
    return 2.0 * kPi * p.geometry.length_m / resistance;
}

double pipe_soil_heat_flow_w(const PipeSegmentParams& p, double soil_layer_thickness_m,
                             double soil_conductivity_w_mk, double t_wall_c,
                             double t_soil1_c) {
    return pipe_soil_conductance_w_k(p, soil_layer_thickness_m, soil_conductivity_w_mk) *
           (t_wall_c - t_soil1_c);
}

PipeRates pipe_rhs(const PipeSegmentParams& p, double specific_heat_j_kgk,
                   double t_fluid_c, double t_wall_c, double inlet_temp_c,
                   double mdot_kg_s, double wall_soil_flow_w) {
    PipeRates r;
    r.fluid_wall_flow_w = fluid_wall_heat_flow_w(p, t_fluid_c, t_wall_c);
    r.d_t_fluid = (mdot_kg_s * specific_heat_j_kgk * (inlet_temp_c - t_fluid_c) -
                   r.fluid_wall_flow_w) /
                  (p.fluid_mass_kg * specific_heat_j_kgk);
    r.d_t_wall = (r.fluid_wall_flow_w - wall_soil_flow_w) /
                 (p.wall_mass_kg * p.wall_specific_heat_j_kgk);
    return r;
}

PressureDrop pressure_drop(const PipeSegmentParams& p, const FluidProps& fluid,
                           double t_fluid_c, double mdot_kg_s) {
    PressureDrop d;
    if (mdot_kg_s <= 0.0) return d;
    const double diameter = 2.0 * p.geometry.inner_radius_m;
    d.reynolds = mdot_kg_s * diameter / (viscosity_pa_s(fluid, t_fluid_c) * p.flow_area_m2);
    d.friction_factor = 0.3164 * std::pow(d.reynolds, -0.25);
    d.delta_pa = 8.0 * p.geometry.length_m * mdot_kg_s * mdot_kg_s /
                 (fluid.density_kg_m3 * kPi * kPi * std::pow(diameter, 5)) *
                 d.friction_factor;
    return d;
}

} // namespace dhnet
