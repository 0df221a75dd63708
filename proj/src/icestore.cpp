#include "dhnet/icestore.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace dhnet {

namespace {
constexpr double kPi = std::numbers::pi;
}

void IceStorageParams::validate(const std::string& path,
                                std::vector<std::string>& errors) const {
    auto positive = [&](double v, const char* field) {
        if (!(v > 0.0)) errors.push_back(path + "." + field + ": must be > 0");
    };
    positive(water_radius_m, "water_radius_m");
    positive(water_volume_m3, "water_volume_m3");
    if (layer_count < 2) errors.push_back(path + ".layer_count: must be >= 2");
    if (coil_count < 1) errors.push_back(path + ".coil_count: must be >= 1");
    positive(coil_inner_radius_m, "coil_inner_radius_m");
    positive(coil_wall_thickness_m, "coil_wall_thickness_m");
    positive(coil_length_m, "coil_length_m");
    positive(coil_conductivity_w_mk, "coil_conductivity_w_mk");
    positive(concrete_thickness_m, "concrete_thickness_m");
    positive(concrete_density_kg_m3, "concrete_density_kg_m3");
    positive(concrete_specific_heat_j_kgk, "concrete_specific_heat_j_kgk");
    positive(concrete_conductivity_w_mk, "concrete_conductivity_w_mk");
    if (soil_layer_count < 1) errors.push_back(path + ".soil_layer_count: must be >= 1");
    positive(soil_layer_thickness_m, "soil_layer_thickness_m");
    positive(htc_fluid_coil_w_m2k, "htc_fluid_coil_w_m2k");
    positive(htc_coil_water_w_m2k, "htc_coil_water_w_m2k");
    positive(htc_water_concrete_w_m2k, "htc_water_concrete_w_m2k");
    positive(ice_conductivity_w_mk, "ice_conductivity_w_mk");
    soil.validate(path + ".soil", errors);
    water.validate(path + ".water", errors);
}

IceStorageGeometry storage_geometry(const IceStorageParams& p,
                                    double coil_fluid_density_kg_m3) {
    IceStorageGeometry g;
    const int nw = p.layer_count;
    const int ns = p.soil_layer_count;
    const double r_hx = p.coil_inner_radius_m;
    const double r_hx_out = r_hx + p.coil_wall_thickness_m;
    const double r_w = p.water_radius_m;
    const double dc = p.concrete_thickness_m;
    const double ds = p.soil_layer_thickness_m;

    g.coil_fluid_volume_m3 = kPi * r_hx * r_hx * p.coil_length_m;
    g.coil_outer_volume_m3 = kPi * r_hx_out * r_hx_out * p.coil_length_m;
    g.coil_fluid_mass_kg =
        coil_fluid_density_kg_m3 * g.coil_fluid_volume_m3 / (p.coil_count * nw);
    g.storage_volume_m3 = p.water_volume_m3 + g.coil_outer_volume_m3;
    g.layer_height_m = g.storage_volume_m3 / (kPi * r_w * r_w * nw);
    g.layer_water_mass_kg = p.water.density_kg_m3 * p.water_volume_m3 / nw;
    g.cross_section_m2 = kPi * r_w * r_w;

    const double z_w = g.layer_height_m;
    const double shell_ring = kPi * ((r_w + dc) * (r_w + dc) - r_w * r_w) * z_w;
    g.concrete_volume_m3.resize(nw);
    g.concrete_mass_kg.resize(nw);
    for (int i = 0; i < nw; ++i) {
        const bool end = (i == 0 || i == nw - 1);
        g.concrete_volume_m3[i] = shell_ring + (end ? kPi * r_w * r_w * dc : 0.0);
        g.concrete_mass_kg[i] = p.concrete_density_kg_m3 * g.concrete_volume_m3[i];
    }

    g.soil_volume_m3.resize(static_cast<std::size_t>(nw) * ns);
    for (int i = 0; i < nw; ++i) {
        const bool end = (i == 0 || i == nw - 1);
        for (int j = 1; j <= ns; ++j) {
            const double r_out = r_w + dc + j * ds;
            const double r_in = r_w + dc + (j - 1) * ds;
            double v = kPi * (r_out * r_out - r_in * r_in) * z_w;
            if (end) v += kPi * r_w * r_w * ds;
            g.soil_volume_m3[static_cast<std::size_t>(i) * ns + (j - 1)] = v;
        }
    }

    g.ua_numerator = 2.0 * kPi * p.coil_length_m / p.coil_count / nw;
    g.ua_base_resistance = 1.0 / (p.htc_fluid_coil_w_m2k * r_hx) +
                           std::log(r_hx_out / r_hx) / p.coil_conductivity_w_mk +
                           1.0 / (p.htc_coil_water_w_m2k * r_hx);

    const double lam_c = p.concrete_conductivity_w_mk;
    const double ln_wall_half = std::log((r_w + dc / 2.0) / r_w);
    g.wall_cond_interior_w_k =
        2.0 * kPi * z_w / (1.0 / (p.htc_water_concrete_w_m2k * r_w) + ln_wall_half / lam_c);
    g.wall_cond_end_w_k =
        kPi / (1.0 / ((2.0 * r_w * z_w + r_w * r_w) * p.htc_water_concrete_w_m2k) +
               ln_wall_half / (2.0 * lam_c * z_w) + (dc / 2.0) / (lam_c * r_w * r_w));

    const double lam_s = p.soil.conductivity_w_mk;
    const double ln_c_out = std::log((r_w + dc) / (r_w + dc / 2.0));
    const double ln_s_in = std::log((r_w + dc + ds / 2.0) / (r_w + dc));
    g.shell_cond_interior_w_k = 2.0 * kPi * z_w / (ln_c_out / lam_c + ln_s_in / lam_s);
    g.shell_cond_end_w_k =
        kPi / (ln_c_out / (2.0 * lam_c * z_w) + ln_s_in / (2.0 * lam_s * z_w) +
               (dc / 2.0) / (lam_c * r_w * r_w) + (ds / 2.0) / (lam_s * r_w * r_w));

    g.soil_radial_cond_w_k.resize(ns);
    for (int j = 1; j <= ns; ++j) {
        const double r_out = r_w + dc + (j + 0.5) * ds;
        const double r_in = r_w + dc + (j - 0.5) * ds;
        g.soil_radial_cond_w_k[j - 1] = 2.0 * lam_s * kPi * z_w / std::log(r_out / r_in);
    }
    g.soil_end_extra_cond_w_k = lam_s / ds * kPi * r_w * r_w;

    g.nc_cond_w_k = p.water.conductivity_w_mk * g.cross_section_m2 / z_w;
    return g;
}

double ice_fraction(const WaterConstants& water, double t_water_c) {
    return std::clamp(t_water_c / water.freeze_end_c, 0.0, 1.0);
}

double ice_radius_m(const IceStorageParams& p, double fraction) {
    const double r_out = p.coil_inner_radius_m + p.coil_wall_thickness_m;
    return std::sqrt(p.water_volume_m3 * fraction / (p.layer_count * kPi * p.coil_length_m) +
                     r_out * r_out);
}

double coil_ua_w_k(const IceStorageParams& p, const IceStorageGeometry& g,
                   CoilString string, double t_water_c) {
    double resistance = g.ua_base_resistance;
    if (string == CoilString::extraction) {
        const double r_ice = ice_radius_m(p, ice_fraction(p.water, t_water_c));
        const double r_out = p.coil_inner_radius_m + p.coil_wall_thickness_m;
        resistance += std::log(r_ice / r_out) / p.ice_conductivity_w_mk;
    }
    return g.ua_numerator / resistance;
}

void coil_rhs(const IceStorageParams& p, const IceStorageGeometry& g, CoilString string,
              double specific_heat_j_kgk, std::span<const double> t_coil_c,
              std::span<const double> t_water_c, double inlet_temp_c,
              double mdot_per_coil_kg_s, std::span<double> d_t_coil,
              std::span<double> q_w_hx_w) {
    const int nw = p.layer_count;
    assert(t_coil_c.size() == static_cast<std::size_t>(nw));
    const double mc = g.coil_fluid_mass_kg * specific_heat_j_kgk;

    double upstream = inlet_temp_c;
    for (int step = 0; step < nw; ++step) {
        const int i = p.coil_inlet_at_top ? (nw - 1 - step) : step;
        const double q = coil_ua_w_k(p, g, string, t_water_c[i]) *
                         (t_coil_c[i] - t_water_c[i]);
        q_w_hx_w[i] = q;
        d_t_coil[i] =
            (mdot_per_coil_kg_s * specific_heat_j_kgk * (upstream - t_coil_c[i]) - q) / mc;
        upstream = t_coil_c[i];
    }
}

void wall_flows(const IceStorageParams& p, const IceStorageGeometry& g,
                std::span<const double> t_water_c, std::span<const double> t_concrete_c,
                std::span<double> q_w_c_w) {
    const int nw = p.layer_count;
    for (int i = 0; i < nw; ++i) {
        const bool end = (i == 0 || i == nw - 1);
        const double cond = end ? g.wall_cond_end_w_k : g.wall_cond_interior_w_k;
        q_w_c_w[i] = cond * (t_water_c[i] - t_concrete_c[i]);
    }
}

void water_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
               std::span<const double> t_water_c, std::span<const double> q_w_hx_w,
               std::span<const double> t_concrete_c, std::span<double> d_t_water) {
    const int nw = p.layer_count;
    for (int i = 0; i < nw; ++i) {
        double q = p.coil_count * q_w_hx_w[i];
        const bool end = (i == 0 || i == nw - 1);
        const double wall_cond = end ? g.wall_cond_end_w_k : g.wall_cond_interior_w_k;
        q -= wall_cond * (t_water_c[i] - t_concrete_c[i]);
        if (i < nw - 1) q += g.nc_cond_w_k * (t_water_c[i + 1] - t_water_c[i]);
        if (i > 0) q -= g.nc_cond_w_k * (t_water_c[i] - t_water_c[i - 1]);
        d_t_water[i] =
            q / (g.layer_water_mass_kg * water_heat_capacity_j_kgk(p.water, t_water_c[i]));
    }
}

void concrete_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
                  std::span<const double> q_w_c_w, std::span<const double> q_c_s_w,
                  std::span<double> d_t_concrete) {
    const int nw = p.layer_count;
    for (int i = 0; i < nw; ++i) {
        d_t_concrete[i] = (q_w_c_w[i] - q_c_s_w[i]) /
                          (g.concrete_mass_kg[i] * p.concrete_specific_heat_j_kgk);
    }
}

double shell_soil_rhs(const IceStorageParams& p, const IceStorageGeometry& g,
                      std::span<const double> t_concrete_c, std::span<const double> t_soil_c,
                      double boundary_temp_c, std::span<double> q_c_s_w,
                      std::span<double> d_t_soil) {
    const int nw = p.layer_count;
    const int ns = p.soil_layer_count;
    double boundary_outflow = 0.0;
    for (int i = 0; i < nw; ++i) {
        const bool end = (i == 0 || i == nw - 1);
        const std::size_t row = static_cast<std::size_t>(i) * ns;
        const double shell_cond = end ? g.shell_cond_end_w_k : g.shell_cond_interior_w_k;
        q_c_s_w[i] = shell_cond * (t_concrete_c[i] - t_soil_c[row]);

        double q_in = q_c_s_w[i];
        for (int j = 0; j < ns; ++j) {
            double cond = g.soil_radial_cond_w_k[j];
            if (end) cond += g.soil_end_extra_cond_w_k;
            const double t_next = (j < ns - 1) ? t_soil_c[row + j + 1] : boundary_temp_c;
            const double q_out = cond * (t_soil_c[row + j] - t_next);
            const double cap = g.soil_volume_m3[row + j] *
                               soil_heat_capacity_j_m3k(p.soil, p.water, t_soil_c[row + j]);
            d_t_soil[row + j] = (q_in - q_out) / cap;
            q_in = q_out;
        }
        boundary_outflow += q_in;
    }
    return boundary_outflow;
}

} // namespace dhnet
