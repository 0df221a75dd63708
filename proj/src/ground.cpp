#include "dhnet/ground.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace dhnet {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHoursPerYear = 8760.0;
} // namespace

double boundary_temperature_c(const BoundaryClimate& climate, double sim_time_s) {
    const double year_hours = (climate.year_start_offset_s + sim_time_s) / 3600.0;
    const double a = -0.5 * std::cos(2.0 * kPi * (year_hours - 900.0) / kHoursPerYear) + 0.5;
    return climate.min_temp_c + a * (climate.max_temp_c - climate.min_temp_c);
}

void SoilColumnParams::derive() {
    const int n = profile.layer_count;
    const double r0 = profile.radius_m[0];
    const double ds = profile.layer_thickness_m;
    const double lp = profile.segment_length_m;
    const double lam = soil.conductivity_w_mk;

    radial_cond_outer_w_k.resize(n);
    radial_cond_adjacent_w_k.resize(n);
    cross_cond_w_k.resize(n);
    pair_cond_w_k.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double r_in = r0 + (i - 0.5) * ds;
        const double r_out = (i < n) ? r0 + (i + 0.5) * ds : r0 + n * ds;
        const double base = 2.0 * lam * kPi * lp / std::log(r_out / r_in);
        radial_cond_outer_w_k[i - 1] = base * profile.outer_factor[i - 1];
        radial_cond_adjacent_w_k[i - 1] = base * profile.adjacent_factor[i - 1];

        // a vanished adjacent section (beta = 0) exchanges nothing
        cross_cond_w_k[i - 1] =
            (profile.adjacent_factor[i - 1] > 0.0)
                ? lam * ds * lp / dhnet::outer_adjacent_distance_m(*this, i)
                : 0.0;

        const double pair_area =
            (profile.segment_height_m[i] - profile.segment_height_m[i - 1]) * lp;
        const double pair_distance =
            supply_return_distance_m ? *supply_return_distance_m : 2.0 * profile.half_spacing_m;
        pair_cond_w_k[i - 1] =
            (profile.segment_height_m[i] > 0.0) ? lam * pair_area / pair_distance : 0.0;
    }
}

double radial_layer_flow_w(const SoilColumnParams& p, int layer, SoilSection section,
                           double t_layer_c, double t_next_c) {
    assert(layer >= 1 && layer <= p.profile.layer_count);
    assert(!p.radial_cond_outer_w_k.empty() && "SoilColumnParams::derive() not called");
    const double cond = (section == SoilSection::outer)
                            ? p.radial_cond_outer_w_k[layer - 1]
                            : p.radial_cond_adjacent_w_k[layer - 1];
    return cond * (t_layer_c - t_next_c);
}

double outer_adjacent_distance_m(const SoilColumnParams& p, int layer) {
    if (p.outer_adjacent_distance_m) return *p.outer_adjacent_distance_m;
    const auto& prof = p.profile;
    const double mean_radius = (prof.radius_m[layer] + prof.radius_m[layer - 1]) / 2.0;
    const double outer_frac = 1.0 - prof.beta_rad / (2.0 * kPi);
    return outer_frac * kPi * mean_radius;
}

double outer_adjacent_flow_w(const SoilColumnParams& p, int layer, double t_outer_c,
                             double t_adjacent_c) {
    assert(layer >= 1 && layer <= p.profile.layer_count);
    return p.cross_cond_w_k[layer - 1] * (t_outer_c - t_adjacent_c);
}

double supply_return_flow_w(const SoilColumnParams& p, int layer, double t_supply_c,
                            double t_return_c) {
    assert(layer >= 1 && layer <= p.profile.layer_count);
    return p.pair_cond_w_k[layer - 1] * (t_supply_c - t_return_c);
}

namespace {

// Balances of one side's outer/adjacent chains. cross_sign is +1 for the
// supply side, -1 for the return side; the supply->return flow is evaluated
// with identical operands on both sides so the cancellation is exact.
void side_rhs(const SoilColumnParams& p, std::span<const double> t_outer,
              std::span<const double> t_adjacent, std::span<const double> t_sup_adjacent,
              std::span<const double> t_ret_adjacent, double pipe_heat_w,
              double boundary_temp_c, double cross_sign, std::span<double> d_outer,
              std::span<double> d_adjacent, SoilPairSummary& summary) {
    const auto& prof = p.profile;
    const int n = prof.layer_count;

    double q_o_in = pipe_heat_w * prof.outer_factor[0];
    double q_a_in = pipe_heat_w * prof.adjacent_factor[0];
    for (int i = 1; i <= n; ++i) {
        const double t_o = t_outer[i - 1];
        const double t_a = t_adjacent[i - 1];

        const double q_o_out = radial_layer_flow_w(
            p, i, SoilSection::outer, t_o, (i < n) ? t_outer[i] : boundary_temp_c);
        double q_a_out;
        if (i < n) {
            q_a_out = radial_layer_flow_w(p, i, SoilSection::adjacent, t_a, t_adjacent[i]);
        } else if (p.boundary_outer_only) {
            q_a_out = 0.0;
        } else {
            q_a_out = radial_layer_flow_w(p, i, SoilSection::adjacent, t_a, boundary_temp_c);
        }
        const double q_cross = outer_adjacent_flow_w(p, i, t_o, t_a);
        const double q_pair = cross_sign * supply_return_flow_w(p, i, t_sup_adjacent[i - 1],
                                                                t_ret_adjacent[i - 1]);

        const double c_o = soil_heat_capacity_j_m3k(p.soil, p.water, t_o);
        const double c_a = soil_heat_capacity_j_m3k(p.soil, p.water, t_a);
        d_outer[i - 1] = (q_o_in - q_o_out - q_cross) / (prof.outer_volume_m3[i - 1] * c_o);
        d_adjacent[i - 1] =
            (prof.adjacent_volume_m3[i - 1] > 0.0)
                ? (q_a_in - q_a_out + q_cross - q_pair) /
                      (prof.adjacent_volume_m3[i - 1] * c_a)
                : 0.0;

        if (i == n) summary.boundary_outflow_w += q_o_out + q_a_out;
        q_o_in = q_o_out;
        q_a_in = q_a_out;
    }
    summary.unapportioned_pipe_heat_w +=
        pipe_heat_w * (1.0 - prof.outer_factor[0] - prof.adjacent_factor[0]);
}

} // namespace

SoilPairSummary soil_pair_rhs(const SoilColumnParams& p, const SoilPairState& s,
                              double pipe_heat_supply_w, double pipe_heat_return_w,
                              double boundary_temp_c, const SoilPairRates& out) {
    SoilPairSummary summary;
    side_rhs(p, s.sup_outer, s.sup_adjacent, s.sup_adjacent, s.ret_adjacent,
             pipe_heat_supply_w, boundary_temp_c, +1.0, out.sup_outer, out.sup_adjacent,
             summary);
    side_rhs(p, s.ret_outer, s.ret_adjacent, s.sup_adjacent, s.ret_adjacent,
             pipe_heat_return_w, boundary_temp_c, -1.0, out.ret_outer, out.ret_adjacent,
             summary);
    return summary;
}

double precipitation_heat_input_kwh_m2a(double precipitation_kg_m2a, double c_water_j_kgk,
                                        double t_precipitation_c, double t_soil_c) {
    const double joules = precipitation_kg_m2a * c_water_j_kgk *
                          (t_precipitation_c - t_soil_c);
    return joules / 3.6e6;
}

} // namespace dhnet
