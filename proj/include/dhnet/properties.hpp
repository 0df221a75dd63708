#pragma once

#include <string>
#include <vector>

namespace dhnet {

struct ViscosityPoint {
    double temp_c = 0.0;
    double viscosity_pa_s = 0.0;
};

// Network fluid (brine). The viscosity table is a piecewise-linear lookup
// over datasheet points, clamped to the end values outside the table range.
struct FluidProps {
    double density_kg_m3 = 1000.0;
    double specific_heat_j_kgk = 4182.0;
    std::vector<ViscosityPoint> viscosity_table;

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

double viscosity_pa_s(const FluidProps& fluid, double temp_c);

struct SoilProps {
    double density_kg_m3 = 1800.0;
    double dry_specific_heat_j_kgk = 840.0;
    double conductivity_w_mk = 1.5;
    double water_share = 0.0; // mass fraction of water in the soil, 0..1

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

// Phase-change constants for water. The fusion enthalpy is normalized to the
// 1 K freezing band between freeze_start_c and freeze_end_c, so it carries
// J/(kg K) like a heat capacity.
struct WaterConstants {
    double c_water_j_kgk = 4182.0;
    double c_ice_j_kgk = 2100.0;
    double fusion_enthalpy_j_kgk = 333550.0;
    double conductivity_w_mk = 0.6;
    double density_kg_m3 = 1000.0;
    double freeze_start_c = 0.0; // fully liquid above this
    double freeze_end_c = -1.0;  // fully frozen below this

    void validate(const std::string& path, std::vector<std::string>& errors) const;
};

// Effective specific heat of storage water: c_w above the freezing band,
// c_ice below it, the normalized fusion enthalpy inside it.
double water_heat_capacity_j_kgk(const WaterConstants& water, double temp_c);

// Volumetric heat capacity of moist soil, J/(m3 K). The water share switches
// between liquid, fusion and ice regimes with the soil temperature.
double soil_heat_capacity_j_m3k(const SoilProps& soil, const WaterConstants& water,
                                double temp_c);

} // namespace dhnet
