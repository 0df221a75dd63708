#include "dhnet/properties.hpp"

#include <algorithm>
#include <cmath>

namespace dhnet {

void FluidProps::validate(const std::string& path, std::vector<std::string>& errors) const {
    if (!(density_kg_m3 > 0.0))
        errors.push_back(path + ".density_kg_m3: must be > 0");
    if (!(specific_heat_j_kgk > 0.0))
        errors.push_back(path + ".specific_heat_j_kgk: must be > 0");
    if (viscosity_table.size() < 2) {
        errors.push_back(path + ".viscosity_table: needs at least 2 entries");
        return;
    }
    for (std::size_t i = 0; i < viscosity_table.size(); ++i) {
        const auto& p = viscosity_table[i];
        if (!(p.viscosity_pa_s > 0.0))
            errors.push_back(path + ".viscosity_table[" + std::to_string(i) +
                             "].viscosity_pa_s: must be > 0");
        if (i > 0 && !(p.temp_c > viscosity_table[i - 1].temp_c))
            errors.push_back(path + ".viscosity_table[" + std::to_string(i) +
                             "].temp_c: temperatures must be strictly increasing");
    }
}

double viscosity_pa_s(const FluidProps& fluid, double temp_c) {
    const auto& tab = fluid.viscosity_table;
    if (temp_c <= tab.front().temp_c) return tab.front().viscosity_pa_s;
    if (temp_c >= tab.back().temp_c) return tab.back().viscosity_pa_s;
    auto hi = std::upper_bound(tab.begin(), tab.end(), temp_c,
                               [](double t, const ViscosityPoint& p) { return t < p.temp_c; });
    auto lo = hi - 1;
    const double w = (temp_c - lo->temp_c) / (hi->temp_c - lo->temp_c);
    return lo->viscosity_pa_s + w * (hi->viscosity_pa_s - lo->viscosity_pa_s);
}

void SoilProps::validate(const std::string& path, std::vector<std::string>& errors) const {
    if (!(density_kg_m3 > 0.0))
        errors.push_back(path + ".density_kg_m3: must be > 0");
    if (!(dry_specific_heat_j_kgk > 0.0))
        errors.push_back(path + ".dry_specific_heat_j_kgk: must be > 0");
    if (!(conductivity_w_mk > 0.0))
        errors.push_back(path + ".conductivity_w_mk: must be > 0");
    if (!(water_share >= 0.0 && water_share <= 1.0))
        errors.push_back(path + ".water_share: must be in [0, 1]");
}

void WaterConstants::validate(const std::string& path, std::vector<std::string>& errors) const {
    if (!(c_ice_j_kgk > 0.0))
        errors.push_back(path + ".c_ice_j_kgk: must be > 0");
    if (!(c_water_j_kgk > c_ice_j_kgk))
        errors.push_back(path + ".c_water_j_kgk: must exceed c_ice_j_kgk");
    if (!(fusion_enthalpy_j_kgk > c_water_j_kgk))
        errors.push_back(path + ".fusion_enthalpy_j_kgk: must exceed c_water_j_kgk");
    if (!(conductivity_w_mk > 0.0))
        errors.push_back(path + ".conductivity_w_mk: must be > 0");
    if (!(density_kg_m3 > 0.0))
        errors.push_back(path + ".density_kg_m3: must be > 0");
    if (!(freeze_end_c < freeze_start_c))
        errors.push_back(path + ".freeze_end_c: must be below freeze_start_c");
}

double water_heat_capacity_j_kgk(const WaterConstants& water, double temp_c) {
    if (temp_c > water.freeze_start_c) return water.c_water_j_kgk;
    if (temp_c < water.freeze_end_c) return water.c_ice_j_kgk;
    return water.fusion_enthalpy_j_kgk;
}

double soil_heat_capacity_j_m3k(const SoilProps& soil, const WaterConstants& water,
                                double temp_c) {
    const double dry = (1.0 - soil.water_share) * soil.dry_specific_heat_j_kgk;
    return soil.density_kg_m3 *
           (dry + soil.water_share * water_heat_capacity_j_kgk(water, temp_c));
}

} // namespace dhnet
