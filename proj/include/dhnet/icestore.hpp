#pragma once

#include "dhnet/properties.hpp"

#include <span>
#include <string>
#include <vector>

namespace dhnet {

// Buried cylindrical ice storage: n_w stratified water layers, two serial
// coil strings (extraction in the center, regeneration at the wall), a
// concrete shell and n_w x n_s surrounding soil shells. Layer 1 is the
// bottom layer; coil_inlet_at_top flips the advection direction of both
// strings.
struct IceStorageParams {
    double water_radius_m = 2.0;  // r_w
    double water_volume_m3 = 50.0; // V_w
    int layer_count = 4;          // n_w, >= 2
    int coil_count = 2;           // n_hx per string
    double coil_inner_radius_m = 0.016;
    double coil_wall_thickness_m = 0.002;
    double coil_length_m = 500.0;       // total per string
    double coil_conductivity_w_mk = 0.4; // lambda_p of the coil material
    double concrete_thickness_m = 0.3;
    double concrete_density_kg_m3 = 2400.0;
    double concrete_specific_heat_j_kgk = 880.0;
    double concrete_conductivity_w_mk = 2.1;
    int soil_layer_count = 3;
    double soil_layer_thickness_m = 0.5;
    SoilProps soil;
    WaterConstants water;
    double htc_fluid_coil_w_m2k = 800.0;    // alpha_f,hx
    double htc_coil_water_w_m2k = 500.0;    // alpha_hx,w
    double htc_water_concrete_w_m2k = 300.0; // alpha_w,c
    double ice_conductivity_w_mk = 2.2;
    bool coil_inlet_at_top = false;

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

// Geometry and temperature-independent conductances, derived once.
struct IceStorageGeometry {
    double coil_fluid_volume_m3 = 0.0; // V_hx,1
    double coil_outer_volume_m3 = 0.0; // V_hx,2
    double coil_fluid_mass_kg = 0.0;   // m_hx, per coil and layer
    double storage_volume_m3 = 0.0;    // V_is
    double layer_height_m = 0.0;       // z_w
    double layer_water_mass_kg = 0.0;  // m_w
    double cross_section_m2 = 0.0;     // A_w
    std::vector<double> concrete_volume_m3; // per layer
    std::vector<double> concrete_mass_kg;
    std::vector<double> soil_volume_m3; // row-major [layer][shell]

    double ua_numerator = 0.0;        // 2 pi l_hx / n_hx / n_w
    double ua_base_resistance = 0.0;  // without the ice conduction term
    double wall_cond_interior_w_k = 0.0;
    double wall_cond_end_w_k = 0.0;
    double shell_cond_interior_w_k = 0.0; // concrete -> first soil shell
    double shell_cond_end_w_k = 0.0;
    std::vector<double> soil_radial_cond_w_k; // per shell, lateral part
    double soil_end_extra_cond_w_k = 0.0;     // base/lid plug, added in end rows
    double nc_cond_w_k = 0.0;                 // natural convection between layers
};

IceStorageGeometry storage_geometry(const IceStorageParams& p,
                                    double coil_fluid_density_kg_m3);

// Volume fraction of ice in one layer as a function of its temperature.
double ice_fraction(const WaterConstants& water, double t_water_c);

// Radius of the ice annulus around one extraction coil at the given fraction.
double ice_radius_m(const IceStorageParams& p, double fraction);

enum class CoilString { extraction, regeneration };

// UA of one representative coil in one layer. Only the extraction string
// carries the ice conduction term.
double coil_ua_w_k(const IceStorageParams& p, const IceStorageGeometry& g,
                   CoilString string, double t_water_c);

// Serial advection through the layers plus the UA exchange with the water.
// mdot_per_coil_kg_s is the flow through one of the n_hx coils; q_w_hx_w
// receives the per-coil heat flow into each layer's water.
void coil_rhs(const IceStorageParams& p, const IceStorageGeometry& g, CoilString string,
              double specific_heat_j_kgk, std::span<const double> t_coil_c,
              std::span<const double> t_water_c, double inlet_temp_c,
              double mdot_per_coil_kg_s, std::span<double> d_t_coil,
              std::span<double> q_w_hx_w);

// Water <-> concrete wall flows; the end layers carry the base/lid path.
void wall_flows(const IceStorageParams& p, const IceStorageGeometry& g,
                std::span<const double> t_water_c, std::span<const double> t_concrete_c,
                std::span<double> q_w_c_w);

// Water layer balances. q_w_hx_w is the per-coil coil->water flow per layer
// (both strings combined); it is scaled by n_hx here.
void water_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
               std::span<const double> t_water_c, std::span<const double> q_w_hx_w,
               std::span<const double> t_concrete_c, std::span<double> d_t_water);

void concrete_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
                  std::span<const double> q_w_c_w, std::span<const double> q_c_s_w,
                  std::span<double> d_t_concrete);

// Concrete -> soil flows and the radial soil-shell balances of every row.
// t_soil_c and d_t_soil are row-major n_w x n_s. Returns the total flow
// leaving the outermost shells to the boundary.
double shell_soil_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
                      std::span<const double> t_concrete_c, std::span<const double> t_soil_c,
                      double boundary_temp_c, std::span<double> q_c_s_w,
                      std::span<double> d_t_soil);

} // namespace dhnet
