#pragma once

#include "dhnet/geometry.hpp"
#include "dhnet/properties.hpp"

namespace dhnet {

// Thermal and hydraulic parameters of one finite-volume pipe segment.
// fluid_mass_kg / wall_mass_kg / flow_area_m2 are derived once via pipe_bulk.
struct PipeSegmentParams {
    PipeGeometry geometry;
    double wall_density_kg_m3 = 940.0;
    double wall_specific_heat_j_kgk = 1900.0;
    double wall_conductivity_w_mk = 0.4; // lambda_p
    double fluid_wall_htc_w_m2k = 500.0; // alpha_p

    double fluid_mass_kg = 0.0;
    double wall_mass_kg = 0.0;
    double flow_area_m2 = 0.0;
    double fluid_wall_cond_w_k = 0.0;

    void derive(double fluid_density_kg_m3);
};

// Series conductance from the wall center through the outer wall half and
// the inner half of the first soil layer.
double pipe_soil_conductance_w_k(const PipeSegmentParams& p, double soil_layer_thickness_m,
                                 double soil_conductivity_w_mk);

// Convection to the wall plus conduction to the wall center. Positive when
// the fluid is warmer than the wall.
double fluid_wall_heat_flow_w(const PipeSegmentParams& p, double t_fluid_c,
                              double t_wall_c);

// Series conduction from the wall center through the outer wall half and the
// inner half of the first soil layer. Positive when the wall is warmer.
double pipe_soil_heat_flow_w(const PipeSegmentParams& p, double soil_layer_thickness_m,
                             double soil_conductivity_w_mk, double t_wall_c,
                             double t_soil1_c);

struct PipeRates {
    double d_t_fluid = 0.0; // K/s
    double d_t_wall = 0.0;  // K/s
    double fluid_wall_flow_w = 0.0;
};

// Energy balances of the fluid volume and the wall. wall_soil_flow_w is the
// already-evaluated heat flow leaving the wall into the soil.
PipeRates pipe_rhs(const PipeSegmentParams& p, double specific_heat_j_kgk,
                   double t_fluid_c, double t_wall_c, double inlet_temp_c,
                   double mdot_kg_s, double wall_soil_flow_w);

struct PressureDrop {
    double delta_pa = 0.0;
    double friction_factor = 0.0;
    double reynolds = 0.0;
};

// Darcy-Weisbach with the Blasius friction correlation. Viscosity is taken
// at the segment's current fluid temperature. Zero flow short-circuits to
// zero pressure drop.
PressureDrop pressure_drop(const PipeSegmentParams& p, const FluidProps& fluid,
                           double t_fluid_c, double mdot_kg_s);

} // namespace dhnet
