#include "dhnet/engine.hpp"

#include "dhnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>

namespace dhnet {

int StateRegistry::add(std::string name, CapacityKind kind, double factor) {
    const int idx = static_cast<int>(slots_.size());
    if (!index_.emplace(name, idx).second)
        throw ValidationError("state registry: duplicate slot name `" + name + "`");
    slots_.push_back(StateSlot{std::move(name), kind, factor});
    return idx;
}

int StateRegistry::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// assembly

struct ModelBuilder {
    const Scenario& scenario;
    const DemandSet& demands;
    std::vector<std::string> errors;

    Assembled build() {
        Assembled out;
        NetworkModel& m = out.model;
        m.fluid_ = scenario.fluid;
        m.soil_ = scenario.soil;
        m.water_ = scenario.water;
        m.climate_ = scenario.climate;
        m.pump_ = scenario.pump;

        build_nodes(m);
        build_storage(m);
        build_runs(m);
        build_stations(m);
        check_topology(m);
        if (!errors.empty()) throw ValidationError(std::move(errors));

        out.initial_state = initial_state(m);
        return out;
    }

    void build_nodes(NetworkModel& m) {
        for (const auto& name : scenario.nodes) {
            NetworkModel::NodeBlock node;
            node.name = name;
            m.nodes_.push_back(std::move(node));
        }
        m.node_parent_.assign(m.nodes_.size(), -1);
    }

    int node_index(const std::string& name) const {
        for (std::size_t i = 0; i < scenario.nodes.size(); ++i)
            if (scenario.nodes[i] == name) return static_cast<int>(i);
        return -1;
    }

    void build_storage(NetworkModel& m) {
        auto& st = m.storage_;
        st.params = scenario.storage;
        st.geom = storage_geometry(st.params, scenario.fluid.density_kg_m3);
        st.outlet_offset = st.params.coil_inlet_at_top ? 0 : st.params.layer_count - 1;
        const int nw = st.params.layer_count;
        const int ns = st.params.soil_layer_count;
        const double coil_cap = st.params.coil_count * st.geom.coil_fluid_mass_kg *
                                scenario.fluid.specific_heat_j_kgk;

        auto add_layers = [&](const char* stem, CapacityKind kind, auto factor) {
            int base = -1;
            for (int i = 1; i <= nw; ++i) {
                const int idx = m.registry_.add(
                    "storage." + std::string(stem) + "." + std::to_string(i), kind,
                    factor(i - 1));
                if (i == 1) base = idx;
            }
            return base;
        };
        st.ext_base = add_layers("hx_ext", CapacityKind::constant,
                                 [&](int) { return coil_cap; });
        st.reg_base = add_layers("hx_reg", CapacityKind::constant,
                                 [&](int) { return coil_cap; });
        st.water_base = add_layers("water", CapacityKind::storage_water,
                                   [&](int) { return st.geom.layer_water_mass_kg; });
        st.concrete_base =
            add_layers("concrete", CapacityKind::constant, [&](int i) {
                return st.geom.concrete_mass_kg[i] * st.params.concrete_specific_heat_j_kgk;
            });
        for (int i = 1; i <= nw; ++i) {
            for (int j = 1; j <= ns; ++j) {
                const int idx = m.registry_.add(
                    "storage.soil." + std::to_string(i) + "." + std::to_string(j),
                    CapacityKind::storage_soil,
                    st.geom.soil_volume_m3[static_cast<std::size_t>(i - 1) * ns + (j - 1)]);
                if (i == 1 && j == 1) st.soil_base = idx;
            }
        }
    }

    void build_runs(NetworkModel& m) {
        const double c_f = scenario.fluid.specific_heat_j_kgk;
        for (std::size_t ri = 0; ri < scenario.runs.size(); ++ri) {
            const auto& cfg = scenario.runs[ri];
            NetworkModel::RunBlock run;
            run.id = cfg.id;
            run.from_node = node_index(cfg.from_node);
            run.to_node = node_index(cfg.to_node);
            const std::string path = "network.runs[" + std::to_string(ri) + "]";
            if (run.from_node < 0 || run.to_node < 0) continue; // reported by validate
            if (run.from_node == run.to_node) {
                errors.push_back(path + ": from and to must differ");
                continue;
            }
            if (run.to_node == 0) {
                errors.push_back(path + ": runs cannot end at the root node");
                continue;
            }
            if (m.node_parent_[run.to_node] != -1) {
                errors.push_back(path + ": node `" + cfg.to_node +
                                 "` already has a feeding run (not a tree)");
                continue;
            }

            const int n_seg = static_cast<int>(
                std::ceil(cfg.length_m / cfg.target_segment_length_m - 1e-12));
            const double seg_len = cfg.length_m / std::max(1, n_seg);
            for (int k = 0; k < std::max(1, n_seg); ++k) {
                NetworkModel::SegmentBlock seg;
                seg.pipe.geometry = PipeGeometry{cfg.inner_radius_m, cfg.wall_thickness_m,
                                                 seg_len};
                seg.pipe.wall_density_kg_m3 = cfg.wall_density_kg_m3;
                seg.pipe.wall_specific_heat_j_kgk = cfg.wall_specific_heat_j_kgk;
                seg.pipe.wall_conductivity_w_mk = cfg.wall_conductivity_w_mk;
                seg.pipe.fluid_wall_htc_w_m2k = cfg.fluid_wall_htc_w_m2k;
                seg.pipe.derive(scenario.fluid.density_kg_m3);
                seg.pipe_soil_cond_w_k = pipe_soil_conductance_w_k(
                    seg.pipe, cfg.soil_layer_thickness_m, scenario.soil.conductivity_w_mk);

                seg.soil.profile = soil_layer_profile(seg.pipe.geometry, cfg.soil_layer_count,
                                                      cfg.soil_layer_thickness_m,
                                                      cfg.half_spacing_m);
                seg.soil.soil = scenario.soil;
                seg.soil.water = scenario.water;
                seg.soil.outer_adjacent_distance_m = cfg.outer_adjacent_distance_m;
                seg.soil.supply_return_distance_m = cfg.supply_return_distance_m;
                seg.soil.boundary_outer_only = cfg.boundary_outer_only;
                seg.soil.derive();

                const std::string stem = "run." + cfg.id + ".seg" + std::to_string(k + 1);
                const double fluid_cap = seg.pipe.fluid_mass_kg * c_f;
                const double wall_cap =
                    seg.pipe.wall_mass_kg * seg.pipe.wall_specific_heat_j_kgk;
                seg.sup_tf = m.registry_.add(stem + ".sup.t_f", CapacityKind::constant, fluid_cap);
                seg.sup_tp = m.registry_.add(stem + ".sup.t_p", CapacityKind::constant, wall_cap);
                seg.ret_tf = m.registry_.add(stem + ".ret.t_f", CapacityKind::constant, fluid_cap);
                seg.ret_tp = m.registry_.add(stem + ".ret.t_p", CapacityKind::constant, wall_cap);
                const int ns = cfg.soil_layer_count;
                for (const char* side : {"sup", "ret"}) {
                    for (const char* section : {"outer", "adj"}) {
                        for (int i = 1; i <= ns; ++i) {
                            const bool outer = std::string(section) == "outer";
                            const double vol = outer ? seg.soil.profile.outer_volume_m3[i - 1]
                                                     : seg.soil.profile.adjacent_volume_m3[i - 1];
                            const int idx = m.registry_.add(
                                stem + ".soil." + side + "." + section + "." + std::to_string(i),
                                CapacityKind::pipe_soil, vol);
                            if (seg.soil_base < 0) seg.soil_base = idx;
                        }
                    }
                }
                run.segments.push_back(std::move(seg));
            }
            const int run_idx = static_cast<int>(m.runs_.size());
            m.node_parent_[run.to_node] = run.from_node;
            m.nodes_[run.to_node].parent_node = run.from_node;
            m.nodes_[run.to_node].parent_run = run_idx;
            m.nodes_[run.from_node].child_runs.push_back(run_idx);
            m.runs_.push_back(std::move(run));
        }
    }

    void build_stations(NetworkModel& m) {
        for (std::size_t ci = 0; ci < scenario.consumers.size(); ++ci) {
            const auto& cfg = scenario.consumers[ci];
            NetworkModel::StationBlock st;
            st.id = cfg.id;
            st.node = node_index(cfg.node);
            st.params = cfg.station;
            if (!demands.has(cfg.demand_key)) {
                errors.push_back("network.consumers[" + std::to_string(ci) +
                                 "].demand: no series `" + cfg.demand_key +
                                 "` in the demand set");
            } else {
                st.demand = demands.series.at(cfg.demand_key);
            }
            st.slot = m.registry_.add("station." + cfg.id + ".t_hhx", CapacityKind::constant,
                                      cfg.station.fluid_mass_kg *
                                          scenario.fluid.specific_heat_j_kgk);
            if (st.node >= 0) m.nodes_[st.node].stations.push_back(static_cast<int>(ci));
            m.stations_.push_back(std::move(st));
        }
    }

    void check_topology(NetworkModel& m) {
        // breadth-first reachability from the root; also yields the
        // parents-before-children run order
        std::vector<bool> seen(m.nodes_.size(), false);
        std::deque<int> queue;
        if (!m.nodes_.empty()) {
            seen[0] = true;
            queue.push_back(0);
        }
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            for (int run_idx : m.nodes_[n].child_runs) {
                m.run_topo_.push_back(run_idx);
                const int child = m.runs_[run_idx].to_node;
                if (!seen[child]) {
                    seen[child] = true;
                    queue.push_back(child);
                }
            }
        }
        for (std::size_t i = 0; i < m.nodes_.size(); ++i) {
            if (!seen[i])
                errors.push_back("network.nodes: node `" + m.nodes_[i].name +
                                 "` is not reachable from the root (cycle or disconnected)");
        }
        for (std::size_t i = 1; i < m.nodes_.size(); ++i) {
            if (seen[i] && m.nodes_[i].child_runs.empty() && m.nodes_[i].stations.empty())
                errors.push_back("network.nodes: leaf node `" + m.nodes_[i].name +
                                 "` has no consumer");
        }
        if (!m.nodes_.empty() && m.nodes_[0].child_runs.empty())
            errors.push_back("network.runs: the root node has no outgoing run");
    }

    std::vector<double> initial_state(const NetworkModel& m) {
        std::vector<double> x(m.registry_.size(), 0.0);
        const double t_b0 = boundary_temperature_c(scenario.climate, 0.0);
        const double net0 = scenario.initial.network_temp_c.value_or(t_b0);
        const double storage0 =
            scenario.initial.storage_temp_c.value_or(scenario.storage_initial_temp_c);

        const auto& st = m.storage_;
        const int nw = st.params.layer_count;
        const int ns = st.params.soil_layer_count;
        for (int i = 0; i < nw; ++i) {
            x[st.ext_base + i] = storage0;
            x[st.reg_base + i] = storage0;
            x[st.water_base + i] = storage0;
            x[st.concrete_base + i] = storage0;
            for (int j = 0; j < ns; ++j) x[st.soil_base + i * ns + j] = t_b0;
        }
        for (const auto& run : m.runs_) {
            for (const auto& seg : run.segments) {
                x[seg.sup_tf] = net0;
                x[seg.sup_tp] = net0;
                x[seg.ret_tf] = net0;
                x[seg.ret_tp] = net0;
                const int nsl = seg.soil.profile.layer_count;
                for (int q = 0; q < 4; ++q) {
                    for (int i = 0; i < nsl; ++i) {
                        double t = t_b0;
                        if (scenario.initial.pipe_soil_layer_temps_c)
                            t = (*scenario.initial.pipe_soil_layer_temps_c)[i];
                        x[seg.soil_base + q * nsl + i] = t;
                    }
                }
            }
        }
        for (const auto& station : m.stations_) x[station.slot] = net0;
        return x;
    }
};

Assembled assemble(const Scenario& scenario, const DemandSet& demands) {
    std::vector<std::string> errors;
    validate_scenario(scenario, errors);
    if (!errors.empty()) throw ValidationError(std::move(errors));
    ModelBuilder builder{scenario, demands, {}};
    return builder.build();
}

// ---------------------------------------------------------------------------
// derivative evaluation

Workspace NetworkModel::make_workspace() const {
    Workspace ws;
    ws.station_q_w.resize(stations_.size());
    ws.station_mdot.resize(stations_.size());
    ws.node_flow.resize(nodes_.size());
    ws.node_supply_c.resize(nodes_.size());
    ws.node_return_c.resize(nodes_.size());
    const int nw = storage_.params.layer_count;
    ws.q_hx_ext.resize(nw);
    ws.q_hx_reg.resize(nw);
    ws.q_hx_sum.resize(nw);
    ws.q_w_c.resize(nw);
    ws.q_c_s.resize(nw);
    return ws;
}

void NetworkModel::rhs(std::span<const double> x, double t, const Controls& controls,
                       Workspace& ws, std::span<double> dxdt, RhsDiagnostics* diag) const {
    const double c_f = fluid_.specific_heat_j_kgk;
    const double t_boundary = boundary_temperature_c(climate_, t);

    // station demands (external sign flipped to the state-equation convention)
    double q_injected_total = 0.0;
    for (std::size_t k = 0; k < stations_.size(); ++k) {
        const double q_external = stations_[k].demand.sample(t);
        ws.station_q_w[k] = -q_external;
        ws.station_mdot[k] = station_mass_flow_kg_s(
            c_f, stations_[k].params.design_spread_k, ws.station_q_w[k]);
        q_injected_total += ws.station_q_w[k];
    }
    if (pump_.constant_flow_kg_s) {
        double total = 0.0;
        for (double f : ws.station_mdot) total += f;
        if (total > 0.0) {
            const double scale = *pump_.constant_flow_kg_s / total;
            for (double& f : ws.station_mdot) f *= scale;
        } else if (!ws.station_mdot.empty()) {
            const double each = *pump_.constant_flow_kg_s / ws.station_mdot.size();
            for (double& f : ws.station_mdot) f = each;
        }
    }

    // subtree flows per node; the flow through a run equals its to-node total
    std::fill(ws.node_flow.begin(), ws.node_flow.end(), 0.0);
    for (std::size_t k = 0; k < stations_.size(); ++k)
        ws.node_flow[stations_[k].node] += ws.station_mdot[k];
    for (auto it = run_topo_.rbegin(); it != run_topo_.rend(); ++it) {
        const RunBlock& run = runs_[*it];
        ws.node_flow[run.from_node] += ws.node_flow[run.to_node];
    }
    const double mdot_network = ws.node_flow[0];

    // return-side mixing at every node (uses states only)
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        double flow_sum = 0.0, weighted = 0.0, plain = 0.0;
        int count = 0;
        for (int si : nodes_[n].stations) {
            const double f = ws.station_mdot[si];
            const double temp = x[stations_[si].slot];
            flow_sum += f;
            weighted += f * temp;
            plain += temp;
            ++count;
        }
        for (int run_idx : nodes_[n].child_runs) {
            const RunBlock& run = runs_[run_idx];
            const double f = ws.node_flow[run.to_node];
            const double temp = x[run.segments.front().ret_tf];
            flow_sum += f;
            weighted += f * temp;
            plain += temp;
            ++count;
        }
        if (flow_sum > 0.0) {
            ws.node_return_c[n] = weighted / flow_sum;
        } else if (count > 0) {
            ws.node_return_c[n] = plain / count;
        } else {
            ws.node_return_c[n] = t_boundary;
        }
    }
    const double t_return = ws.node_return_c[0];

    // valve split and supply temperature
    const bool heating = controls.mode == ControlMode::heating;
    const int active_base = heating ? storage_.ext_base : storage_.reg_base;
    const double t_storage_out = x[active_base + storage_.outlet_offset];
    const ValveSplit split =
        mixing_valve(controls.valve_position, mdot_network, t_storage_out, t_return);

    ws.node_supply_c[0] = split.supply_temp_c;
    for (int run_idx : run_topo_) {
        const RunBlock& run = runs_[run_idx];
        ws.node_supply_c[run.to_node] = x[run.segments.back().sup_tf];
    }

    // pipes and their soil columns
    double boundary_outflow = 0.0;
    double unapportioned = 0.0;
    for (const RunBlock& run : runs_) {
        const double flow = ws.node_flow[run.to_node];
        const int n_seg = static_cast<int>(run.segments.size());
        for (int k = 0; k < n_seg; ++k) {
            const auto& seg = run.segments[k];
            const int nsl = seg.soil.profile.layer_count;
            const double k_o1 = seg.soil.profile.outer_factor[0];
            const double k_a1 = seg.soil.profile.adjacent_factor[0];

            const double sup_inlet =
                (k == 0) ? ws.node_supply_c[run.from_node] : x[run.segments[k - 1].sup_tf];
            const double ret_inlet = (k == n_seg - 1) ? ws.node_return_c[run.to_node]
                                                      : x[run.segments[k + 1].ret_tf];

            const double t_s1_sup =
                (k_o1 * x[seg.soil_base + 0] + k_a1 * x[seg.soil_base + nsl]) / (k_o1 + k_a1);
            const double t_s1_ret =
                (k_o1 * x[seg.soil_base + 2 * nsl] + k_a1 * x[seg.soil_base + 3 * nsl]) /
                (k_o1 + k_a1);
            const double q_ps_sup = seg.pipe_soil_cond_w_k * (x[seg.sup_tp] - t_s1_sup);
            const double q_ps_ret = seg.pipe_soil_cond_w_k * (x[seg.ret_tp] - t_s1_ret);

            const PipeRates sup =
                pipe_rhs(seg.pipe, c_f, x[seg.sup_tf], x[seg.sup_tp], sup_inlet, flow, q_ps_sup);
            const PipeRates ret =
                pipe_rhs(seg.pipe, c_f, x[seg.ret_tf], x[seg.ret_tp], ret_inlet, flow, q_ps_ret);
            dxdt[seg.sup_tf] = sup.d_t_fluid;
            dxdt[seg.sup_tp] = sup.d_t_wall;
            dxdt[seg.ret_tf] = ret.d_t_fluid;
            dxdt[seg.ret_tp] = ret.d_t_wall;

            const SoilPairState state{
                x.subspan(seg.soil_base, nsl), x.subspan(seg.soil_base + nsl, nsl),
                x.subspan(seg.soil_base + 2 * nsl, nsl), x.subspan(seg.soil_base + 3 * nsl, nsl)};
            const SoilPairRates rates{
                dxdt.subspan(seg.soil_base, nsl), dxdt.subspan(seg.soil_base + nsl, nsl),
                dxdt.subspan(seg.soil_base + 2 * nsl, nsl),
                dxdt.subspan(seg.soil_base + 3 * nsl, nsl)};
            const SoilPairSummary summary =
                soil_pair_rhs(seg.soil, state, q_ps_sup, q_ps_ret, t_boundary, rates);
            boundary_outflow += summary.boundary_outflow_w;
            unapportioned += summary.unapportioned_pipe_heat_w;
        }
    }

    // storage
    {
        const auto& st = storage_;
        const int nw = st.params.layer_count;
        const double mdot_per_coil = split.mdot_storage_kg_s / st.params.coil_count;
        coil_rhs(st.params, st.geom, CoilString::extraction, c_f,
                 x.subspan(st.ext_base, nw), x.subspan(st.water_base, nw), t_return,
                 heating ? mdot_per_coil : 0.0, dxdt.subspan(st.ext_base, nw), ws.q_hx_ext);
        coil_rhs(st.params, st.geom, CoilString::regeneration, c_f,
                 x.subspan(st.reg_base, nw), x.subspan(st.water_base, nw), t_return,
                 heating ? 0.0 : mdot_per_coil, dxdt.subspan(st.reg_base, nw), ws.q_hx_reg);
        for (int i = 0; i < nw; ++i) ws.q_hx_sum[i] = ws.q_hx_ext[i] + ws.q_hx_reg[i];

        const int n_cells = nw * st.params.soil_layer_count;
        boundary_outflow += shell_soil_rhs(
            st.params, st.geom, x.subspan(st.concrete_base, nw), x.subspan(st.soil_base, n_cells),
            t_boundary, ws.q_c_s, dxdt.subspan(st.soil_base, n_cells));
        wall_flows(st.params, st.geom, x.subspan(st.water_base, nw),
                   x.subspan(st.concrete_base, nw), ws.q_w_c);
        water_rhs(st.params, st.geom, x.subspan(st.water_base, nw), ws.q_hx_sum,
                  x.subspan(st.concrete_base, nw), dxdt.subspan(st.water_base, nw));
        concrete_rhs(st.params, st.geom, ws.q_w_c, ws.q_c_s, dxdt.subspan(st.concrete_base, nw));
    }

    // stations
    for (std::size_t k = 0; k < stations_.size(); ++k) {
        const auto& st = stations_[k];
        dxdt[st.slot] = station_rhs(st.params, c_f, x[st.slot], ws.node_supply_c[st.node],
                                    ws.station_mdot[k], ws.station_q_w[k]);
    }

    for (int i = 0; i < registry_.size(); ++i) {
        if (!std::isfinite(dxdt[i]))
            throw EngineError("non-finite derivative for state `" + registry_.slot(i).name +
                              "` at t = " + std::to_string(t) + " s");
    }

    if (diag) {
        diag->supply_temp_c = split.supply_temp_c;
        diag->return_temp_c = t_return;
        diag->storage_outlet_c = t_storage_out;
        diag->mdot_network_kg_s = mdot_network;
        diag->mdot_storage_kg_s = split.mdot_storage_kg_s;
        diag->mdot_bypass_kg_s = split.mdot_bypass_kg_s;
        diag->station_injection_w = q_injected_total;
        diag->boundary_outflow_w = boundary_outflow;
        diag->unapportioned_pipe_heat_w = unapportioned;
        diag->boundary_temp_c = t_boundary;

        double water_sum = 0.0, ice_sum = 0.0;
        const int nw = storage_.params.layer_count;
        for (int i = 0; i < nw; ++i) {
            water_sum += x[storage_.water_base + i];
            ice_sum += ice_fraction(storage_.params.water, x[storage_.water_base + i]);
        }
        diag->water_mean_c = water_sum / nw;
        diag->ice_fraction_mean = ice_sum / nw;

        // pressure drop along the worst root-to-leaf path, supply + return
        std::vector<double> node_dp(nodes_.size(), 0.0);
        double dp_max = 0.0;
        for (int run_idx : run_topo_) {
            const RunBlock& run = runs_[run_idx];
            const double flow = ws.node_flow[run.to_node];
            double dp_run = 0.0;
            for (const auto& seg : run.segments) {
                dp_run += pressure_drop(seg.pipe, fluid_, x[seg.sup_tf], flow).delta_pa;
                dp_run += pressure_drop(seg.pipe, fluid_, x[seg.ret_tf], flow).delta_pa;
            }
            node_dp[run.to_node] = node_dp[run.from_node] + dp_run;
            dp_max = std::max(dp_max, node_dp[run.to_node]);
        }
        diag->dp_total_pa = dp_max;
        diag->pump_power_w =
            pump_power_w(dp_max, mdot_network, fluid_.density_kg_m3, pump_.efficiency);
    }
}

double NetworkModel::capacity_j_k(int slot, double temp_c) const {
    const StateSlot& s = registry_.slot(slot);
    switch (s.kind) {
        case CapacityKind::constant:
            return s.factor;
        case CapacityKind::pipe_soil:
            return s.factor * soil_heat_capacity_j_m3k(soil_, water_, temp_c);
        case CapacityKind::storage_soil:
            return s.factor *
                   soil_heat_capacity_j_m3k(storage_.params.soil, storage_.params.water, temp_c);
        case CapacityKind::storage_water:
            return s.factor * water_heat_capacity_j_kgk(storage_.params.water, temp_c);
    }
    return 0.0;
}

double NetworkModel::energy_rate_w(std::span<const double> x,
                                   std::span<const double> dxdt) const {
    double sum = 0.0;
    for (int i = 0; i < registry_.size(); ++i) sum += capacity_j_k(i, x[i]) * dxdt[i];
    return sum;
}

double NetworkModel::min_time_constant_s(std::span<const double> x, double t,
                                         const Controls& controls) const {
    Workspace ws = make_workspace();
    std::vector<double> base(x.begin(), x.end());
    std::vector<double> f0(registry_.size()), f1(registry_.size());
    rhs(base, t, controls, ws, f0);
    double tau_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < registry_.size(); ++i) {
        const double eps = std::max(1e-6, 1e-8 * std::abs(base[i]));
        const double saved = base[i];
        base[i] = saved + eps;
        rhs(base, t, controls, ws, f1);
        base[i] = saved;
        const double diag = (f1[i] - f0[i]) / eps;
        if (std::abs(diag) > 1e-12) tau_min = std::min(tau_min, 1.0 / std::abs(diag));
    }
    return tau_min;
}

// ---------------------------------------------------------------------------
// integrators

void euler_fixed(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
                 double dt) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
    const double h = span / n;
    std::vector<double> k(x.size());
    double t = t0;
    for (int s = 0; s < n; ++s) {
        f(t, x, k);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * k[i];
        t = t0 + (s + 1) * h;
    }
}

void rk4_fixed(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
               double dt) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
    const double h = span / n;
    const std::size_t dim = x.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    double t = t0;
    for (int s = 0; s < n; ++s) {
        f(t, x, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + h * k3[i];
        f(t + h, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = t0 + (s + 1) * h;
    }
}

void rk45_adaptive(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
                   double h_init, double rel_tol, double abs_tol,
                   const std::function<std::string(int)>& names) {
    // Dormand-Prince 5(4) coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const std::size_t dim = x.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
        tmp(dim), x_new(dim);
    double t = t0;
    double h = std::min(h_init, t1 - t0);
    const double h_min = std::max(1e-9, 1e-12 * (t1 - t0));

    while (t < t1 - 1e-9 * std::max(1.0, t1)) {
        h = std::min(h, t1 - t);
        f(t, x, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + h * a21 * k1[i];
        f(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = x[i] +
                     h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, tmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            x_new[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        f(t + h, x_new, k7);

        double err_sq = 0.0;
        double worst = 0.0;
        int worst_idx = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double scale =
                abs_tol + rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
            const double ratio = err / scale;
            err_sq += ratio * ratio;
            if (std::abs(ratio) > worst) {
                worst = std::abs(ratio);
                worst_idx = static_cast<int>(i);
            }
        }
        const double err_norm = std::sqrt(err_sq / dim);
        if (err_norm <= 1.0) {
            t += h;
            x.swap(x_new);
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < h_min) {
            throw EngineError("adaptive step underflow at t = " + std::to_string(t) +
                              " s (worst component: " +
                              (names ? names(worst_idx) : std::to_string(worst_idx)) + ")");
        }
    }
}

// ---------------------------------------------------------------------------
// sampled-data simulation loop

Trajectory integrate(const NetworkModel& model, const Scenario& scenario,
                     std::span<const double> x0, const IntegrateOptions& options) {
    const IntegratorConfig& cfg = options.config;
    Trajectory traj;
    traj.columns = {"t_n_sup_c",     "t_n_ret_c",      "t_storage_out_c", "valve_y",
                    "control_mode",  "mdot_n_kgps",    "mdot_is_kgps",    "mdot_bp_kgps",
                    "dp_total_pa",   "pump_p_el_w",    "q_stations_w",    "q_boundary_w",
                    "t_boundary_c",  "t_w_mean_c",     "ice_fraction_mean"};
    for (const auto& slot : model.registry().slots()) traj.columns.push_back(slot.name);

    ValveController ctrl;
    ctrl.gain_p = scenario.controller.gain_p;
    ctrl.gain_i = scenario.controller.gain_i;
    ctrl.schedule = scenario.controller.schedule;
    ctrl.year_start_offset_s = scenario.climate.year_start_offset_s;
    ctrl.position = scenario.controller.initial_position;

    Controls controls;
    controls.valve_position = ctrl.position;
    controls.mode = schedule_entry(ctrl, 0.0).mode;

    auto apply_override = [&](double t) {
        const auto& overrides = scenario.controller.position_overrides;
        const std::pair<double, std::optional<double>>* active = nullptr;
        for (const auto& entry : overrides)
            if (entry.first <= t) active = &entry;
        if (active && active->second) {
            controls.valve_position = *active->second;
            ctrl.position = *active->second;
        }
    };
    apply_override(0.0);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> dxdt(x.size());
    Workspace ws = model.make_workspace();

    if (options.warn_stiffness && cfg.method != IntegratorMethod::adaptive_rk45) {
        const double tau = model.min_time_constant_s(x, 0.0, controls);
        if (cfg.dt_s > 0.5 * tau) {
            std::fprintf(stderr,
                         "warning: dt = %.3g s exceeds half the fastest time constant "
                         "(%.3g s); the explicit integrator may be unstable\n",
                         cfg.dt_s, tau);
        }
    }

    auto names = [&](int i) { return model.registry().slot(i).name; };
    auto f = [&](double t, std::span<const double> xs, std::span<double> dx) {
        model.rhs(xs, t, controls, ws, dx);
    };

    auto snapshot = [&](double t) {
        RhsDiagnostics diag;
        model.rhs(x, t, controls, ws, dxdt, &diag);
        std::vector<double> row;
        row.reserve(traj.columns.size());
        row.push_back(diag.supply_temp_c);
        row.push_back(diag.return_temp_c);
        row.push_back(diag.storage_outlet_c);
        row.push_back(controls.valve_position);
        row.push_back(controls.mode == ControlMode::heating ? 0.0 : 1.0);
        row.push_back(diag.mdot_network_kg_s);
        row.push_back(diag.mdot_storage_kg_s);
        row.push_back(diag.mdot_bypass_kg_s);
        row.push_back(diag.dp_total_pa);
        row.push_back(diag.pump_power_w);
        row.push_back(diag.station_injection_w);
        row.push_back(diag.boundary_outflow_w);
        row.push_back(diag.boundary_temp_c);
        row.push_back(diag.water_mean_c);
        row.push_back(diag.ice_fraction_mean);
        row.insert(row.end(), x.begin(), x.end());
        traj.time_s.push_back(t);
        traj.rows.push_back(std::move(row));
        return diag;
    };

    auto measure = [&](double t) {
        RhsDiagnostics diag;
        model.rhs(x, t, controls, ws, dxdt, &diag);
        return diag;
    };

    const int stride = std::max(1, options.snapshot_stride);
    double t = 0.0;
    long boundary = 0;
    snapshot(0.0);
    while (t < cfg.duration_s - 1e-9) {
        const double t_next = std::min(t + cfg.output_interval_s, cfg.duration_s);
        switch (cfg.method) {
            case IntegratorMethod::explicit_euler:
                euler_fixed(f, x, t, t_next, cfg.dt_s);
                break;
            case IntegratorMethod::rk4:
                rk4_fixed(f, x, t, t_next, cfg.dt_s);
                break;
            case IntegratorMethod::adaptive_rk45:
                rk45_adaptive(f, x, t, t_next, std::min(cfg.dt_s, t_next - t), cfg.rel_tol,
                              cfg.abs_tol, names);
                break;
        }
        t = t_next;
        ++boundary;
        const bool final_boundary = t >= cfg.duration_s - 1e-9;
        RhsDiagnostics diag;
        if (boundary % stride == 0 || final_boundary) {
            diag = snapshot(t);
        } else {
            diag = measure(t);
        }
        if (!final_boundary) {
            if (options.control_hook) {
                options.control_hook(t, diag, controls);
            } else {
                controls.mode = schedule_entry(ctrl, t).mode;
                controls.valve_position =
                    pi_step(ctrl, diag.supply_temp_c, t, cfg.output_interval_s);
                apply_override(t);
            }
        }
    }
    return traj;
}

} // namespace dhnet
