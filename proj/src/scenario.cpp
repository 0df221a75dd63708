#include "dhnet/scenario.hpp"

#include "dhnet/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace dhnet {

namespace {

using nlohmann::json;

// Collects every problem instead of failing on the first one.
struct Reader {
    std::vector<std::string>& errors;

    bool require_object(const json& j, const std::string& path) {
        if (j.is_object()) return true;
        errors.push_back(path + ": expected an object");
        return false;
    }

    const json* child(const json& j, const std::string& path, const char* key,
                      bool required) {
        if (!j.is_object()) return nullptr;
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) errors.push_back(path + "." + key + ": missing");
            return nullptr;
        }
        return &*it;
    }

    double number(const json& j, const std::string& path, const char* key, double fallback,
                  bool required = false) {
        const json* c = child(j, path, key, required);
        if (!c) return fallback;
        if (!c->is_number()) {
            errors.push_back(path + "." + key + ": expected a number");
            return fallback;
        }
        return c->get<double>();
    }

    int integer(const json& j, const std::string& path, const char* key, int fallback,
                bool required = false) {
        const json* c = child(j, path, key, required);
        if (!c) return fallback;
        if (!c->is_number_integer()) {
            errors.push_back(path + "." + key + ": expected an integer");
            return fallback;
        }
        return c->get<int>();
    }

    bool boolean(const json& j, const std::string& path, const char* key, bool fallback) {
        const json* c = child(j, path, key, false);
        if (!c) return fallback;
        if (!c->is_boolean()) {
            errors.push_back(path + "." + key + ": expected a boolean");
            return fallback;
        }
        return c->get<bool>();
    }

    std::string text(const json& j, const std::string& path, const char* key,
                     const std::string& fallback, bool required = false) {
        const json* c = child(j, path, key, required);
        if (!c) return fallback;
        if (!c->is_string()) {
            errors.push_back(path + "." + key + ": expected a string");
            return fallback;
        }
        return c->get<std::string>();
    }

    std::optional<double> opt_number(const json& j, const std::string& path, const char* key) {
        const json* c = child(j, path, key, false);
        if (!c || c->is_null()) return std::nullopt;
        if (!c->is_number()) {
            errors.push_back(path + "." + key + ": expected a number");
            return std::nullopt;
        }
        return c->get<double>();
    }
};

void read_fluid(Reader& r, const json& j, FluidProps& fluid) {
    const std::string path = "fluid";
    fluid.density_kg_m3 = r.number(j, path, "density_kg_m3", fluid.density_kg_m3, true);
    fluid.specific_heat_j_kgk =
        r.number(j, path, "specific_heat_j_kgk", fluid.specific_heat_j_kgk, true);
    if (const json* table = r.child(j, path, "viscosity_table", true)) {
        if (!table->is_array()) {
            r.errors.push_back(path + ".viscosity_table: expected an array");
        } else {
            for (std::size_t i = 0; i < table->size(); ++i) {
                const std::string p = path + ".viscosity_table[" + std::to_string(i) + "]";
                const json& e = (*table)[i];
                if (!r.require_object(e, p)) continue;
                ViscosityPoint pt;
                pt.temp_c = r.number(e, p, "temp_c", 0.0, true);
                pt.viscosity_pa_s = r.number(e, p, "viscosity_pa_s", 0.0, true);
                fluid.viscosity_table.push_back(pt);
            }
        }
    }
}

void read_soil(Reader& r, const json& j, const std::string& path, SoilProps& soil) {
    soil.density_kg_m3 = r.number(j, path, "density_kg_m3", soil.density_kg_m3);
    soil.dry_specific_heat_j_kgk =
        r.number(j, path, "dry_specific_heat_j_kgk", soil.dry_specific_heat_j_kgk);
    soil.conductivity_w_mk = r.number(j, path, "conductivity_w_mk", soil.conductivity_w_mk);
    soil.water_share = r.number(j, path, "water_share", soil.water_share);
}

void read_water(Reader& r, const json& j, WaterConstants& w) {
    const std::string path = "water_constants";
    w.c_water_j_kgk = r.number(j, path, "c_water_j_kgk", w.c_water_j_kgk);
    w.c_ice_j_kgk = r.number(j, path, "c_ice_j_kgk", w.c_ice_j_kgk);
    w.fusion_enthalpy_j_kgk = r.number(j, path, "fusion_enthalpy_j_kgk", w.fusion_enthalpy_j_kgk);
    w.conductivity_w_mk = r.number(j, path, "conductivity_w_mk", w.conductivity_w_mk);
    w.density_kg_m3 = r.number(j, path, "density_kg_m3", w.density_kg_m3);
    w.freeze_start_c = r.number(j, path, "freeze_start_c", w.freeze_start_c);
    w.freeze_end_c = r.number(j, path, "freeze_end_c", w.freeze_end_c);
}

void read_run(Reader& r, const json& j, const std::string& path, const json* defaults,
              PipeRunConfig& run) {
    auto num = [&](const char* key, double fallback) {
        double v = fallback;
        if (defaults) v = r.number(*defaults, "pipe_defaults", key, v);
        return r.number(j, path, key, v);
    };
    auto integer = [&](const char* key, int fallback) {
        int v = fallback;
        if (defaults) v = r.integer(*defaults, "pipe_defaults", key, v);
        return r.integer(j, path, key, v);
    };
    run.id = r.text(j, path, "id", "", true);
    run.from_node = r.text(j, path, "from", "", true);
    run.to_node = r.text(j, path, "to", "", true);
    run.length_m = r.number(j, path, "length_m", 0.0, true);
    run.inner_radius_m = num("inner_radius_m", run.inner_radius_m);
    run.wall_thickness_m = num("wall_thickness_m", run.wall_thickness_m);
    run.wall_density_kg_m3 = num("wall_density_kg_m3", run.wall_density_kg_m3);
    run.wall_specific_heat_j_kgk = num("wall_specific_heat_j_kgk", run.wall_specific_heat_j_kgk);
    run.wall_conductivity_w_mk = num("wall_conductivity_w_mk", run.wall_conductivity_w_mk);
    run.fluid_wall_htc_w_m2k = num("fluid_wall_htc_w_m2k", run.fluid_wall_htc_w_m2k);
    run.target_segment_length_m = num("target_segment_length_m", run.target_segment_length_m);
    run.soil_layer_count = integer("soil_layer_count", run.soil_layer_count);
    run.soil_layer_thickness_m = num("soil_layer_thickness_m", run.soil_layer_thickness_m);
    run.half_spacing_m = num("half_spacing_m", run.half_spacing_m);
    run.outer_adjacent_distance_m = r.opt_number(j, path, "outer_adjacent_distance_m");
    run.supply_return_distance_m = r.opt_number(j, path, "supply_return_distance_m");
    run.boundary_outer_only = r.boolean(j, path, "boundary_outer_only", false);
    if (defaults && !run.boundary_outer_only)
        run.boundary_outer_only = r.boolean(*defaults, "pipe_defaults", "boundary_outer_only", false);
}

void read_storage(Reader& r, const json& j, const SoilProps& soil_default,
                  const WaterConstants& water, IceStorageParams& s) {
    const std::string path = "storage";
    s.soil = soil_default;
    s.water = water;
    s.water_radius_m = r.number(j, path, "water_radius_m", s.water_radius_m, true);
    s.water_volume_m3 = r.number(j, path, "water_volume_m3", s.water_volume_m3, true);
    s.layer_count = r.integer(j, path, "layer_count", s.layer_count);
    s.coil_count = r.integer(j, path, "coil_count", s.coil_count);
    s.coil_inner_radius_m = r.number(j, path, "coil_inner_radius_m", s.coil_inner_radius_m);
    s.coil_wall_thickness_m = r.number(j, path, "coil_wall_thickness_m", s.coil_wall_thickness_m);
    s.coil_length_m = r.number(j, path, "coil_length_m", s.coil_length_m, true);
    s.coil_conductivity_w_mk = r.number(j, path, "coil_conductivity_w_mk", s.coil_conductivity_w_mk);
    s.concrete_thickness_m = r.number(j, path, "concrete_thickness_m", s.concrete_thickness_m);
    s.concrete_density_kg_m3 = r.number(j, path, "concrete_density_kg_m3", s.concrete_density_kg_m3);
    s.concrete_specific_heat_j_kgk =
        r.number(j, path, "concrete_specific_heat_j_kgk", s.concrete_specific_heat_j_kgk);
    s.concrete_conductivity_w_mk =
        r.number(j, path, "concrete_conductivity_w_mk", s.concrete_conductivity_w_mk);
    s.soil_layer_count = r.integer(j, path, "soil_layer_count", s.soil_layer_count);
    s.soil_layer_thickness_m = r.number(j, path, "soil_layer_thickness_m", s.soil_layer_thickness_m);
    if (const json* soil = r.child(j, path, "soil", false))
        read_soil(r, *soil, path + ".soil", s.soil);
    s.htc_fluid_coil_w_m2k = r.number(j, path, "htc_fluid_coil_w_m2k", s.htc_fluid_coil_w_m2k);
    s.htc_coil_water_w_m2k = r.number(j, path, "htc_coil_water_w_m2k", s.htc_coil_water_w_m2k);
    s.htc_water_concrete_w_m2k =
        r.number(j, path, "htc_water_concrete_w_m2k", s.htc_water_concrete_w_m2k);
    s.ice_conductivity_w_mk = r.number(j, path, "ice_conductivity_w_mk", s.ice_conductivity_w_mk);
    s.coil_inlet_at_top = r.boolean(j, path, "coil_inlet_at_top", false);
}

void read_controller(Reader& r, const json& j, ControllerConfig& c) {
    const std::string path = "controller";
    c.gain_p = r.number(j, path, "gain_p", c.gain_p);
    c.gain_i = r.number(j, path, "gain_i", c.gain_i);
    c.initial_position = r.number(j, path, "initial_position", c.initial_position);
    if (const json* sched = r.child(j, path, "schedule", true)) {
        if (!sched->is_array()) {
            r.errors.push_back(path + ".schedule: expected an array");
        } else {
            for (std::size_t i = 0; i < sched->size(); ++i) {
                const std::string p = path + ".schedule[" + std::to_string(i) + "]";
                const json& e = (*sched)[i];
                if (!r.require_object(e, p)) continue;
                SetpointEntry entry;
                entry.day_of_year = r.integer(e, p, "day_of_year", 0, true);
                entry.setpoint_c = r.number(e, p, "setpoint_c", 0.0, true);
                const std::string mode = r.text(e, p, "mode", "heating");
                if (mode == "heating") {
                    entry.mode = ControlMode::heating;
                } else if (mode == "regeneration") {
                    entry.mode = ControlMode::regeneration;
                } else {
                    r.errors.push_back(p + ".mode: expected `heating` or `regeneration`");
                }
                c.schedule.push_back(entry);
            }
        }
    }
    if (const json* ov = r.child(j, path, "position_overrides", false)) {
        if (!ov->is_array()) {
            r.errors.push_back(path + ".position_overrides: expected an array");
        } else {
            for (std::size_t i = 0; i < ov->size(); ++i) {
                const std::string p = path + ".position_overrides[" + std::to_string(i) + "]";
                const json& e = (*ov)[i];
                if (!r.require_object(e, p)) continue;
                const double t = r.number(e, p, "time_s", 0.0, true);
                std::optional<double> y = r.opt_number(e, p, "position");
                if (y && !(*y >= 0.0 && *y <= 1.0))
                    r.errors.push_back(p + ".position: must be in [0, 1] or null");
                c.position_overrides.emplace_back(t, y);
            }
        }
    }
}

void read_integrator(Reader& r, const json& j, IntegratorConfig& c) {
    const std::string path = "integrator";
    const std::string method = r.text(j, path, "method", "rk4");
    if (method == "euler") {
        c.method = IntegratorMethod::explicit_euler;
    } else if (method == "rk4") {
        c.method = IntegratorMethod::rk4;
    } else if (method == "rk45") {
        c.method = IntegratorMethod::adaptive_rk45;
    } else {
        r.errors.push_back(path + ".method: expected `euler`, `rk4` or `rk45`");
    }
    c.dt_s = r.number(j, path, "dt_s", c.dt_s);
    c.rel_tol = r.number(j, path, "rel_tol", c.rel_tol);
    c.abs_tol = r.number(j, path, "abs_tol", c.abs_tol);
    c.output_interval_s = r.number(j, path, "output_interval_s", c.output_interval_s);
    c.duration_s = r.number(j, path, "duration_s", c.duration_s);
}

} // namespace

void validate_scenario(const Scenario& s, std::vector<std::string>& errors) {
    s.fluid.validate("fluid", errors);
    s.soil.validate("soil", errors);
    s.water.validate("water_constants", errors);
    if (!(s.climate.min_temp_c <= s.climate.max_temp_c))
        errors.push_back("boundary_climate.min_temp_c: must not exceed max_temp_c");

    if (s.nodes.empty()) errors.push_back("network.nodes: must not be empty");
    std::unordered_set<std::string> node_names;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        if (!node_names.insert(s.nodes[i]).second)
            errors.push_back("network.nodes[" + std::to_string(i) + "]: duplicate node `" +
                             s.nodes[i] + "`");
    }

    std::unordered_set<std::string> run_ids;
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
        const auto& run = s.runs[i];
        const std::string path = "network.runs[" + std::to_string(i) + "]";
        if (!run_ids.insert(run.id).second)
            errors.push_back(path + ".id: duplicate run id `" + run.id + "`");
        if (!node_names.count(run.from_node))
            errors.push_back(path + ".from: unknown node `" + run.from_node + "`");
        if (!node_names.count(run.to_node))
            errors.push_back(path + ".to: unknown node `" + run.to_node + "`");
        if (!(run.length_m > 0.0)) errors.push_back(path + ".length_m: must be > 0");
        if (!(run.inner_radius_m > 0.0)) errors.push_back(path + ".inner_radius_m: must be > 0");
        if (!(run.wall_thickness_m > 0.0))
            errors.push_back(path + ".wall_thickness_m: must be > 0");
        if (!(run.wall_density_kg_m3 > 0.0))
            errors.push_back(path + ".wall_density_kg_m3: must be > 0");
        if (!(run.wall_specific_heat_j_kgk > 0.0))
            errors.push_back(path + ".wall_specific_heat_j_kgk: must be > 0");
        if (!(run.wall_conductivity_w_mk > 0.0))
            errors.push_back(path + ".wall_conductivity_w_mk: must be > 0");
        if (!(run.fluid_wall_htc_w_m2k > 0.0))
            errors.push_back(path + ".fluid_wall_htc_w_m2k: must be > 0");
        if (!(run.target_segment_length_m > 0.0))
            errors.push_back(path + ".target_segment_length_m: must be > 0");
        if (run.soil_layer_count < 1)
            errors.push_back(path + ".soil_layer_count: must be >= 1");
        if (!(run.soil_layer_thickness_m > 0.0))
            errors.push_back(path + ".soil_layer_thickness_m: must be > 0");
        if (!(run.half_spacing_m > run.inner_radius_m + run.wall_thickness_m))
            errors.push_back(path + ".half_spacing_m: must exceed the pipe outer radius");
    }

    std::unordered_set<std::string> consumer_ids;
    if (s.consumers.empty())
        errors.push_back("network.consumers: must not be empty");
    for (std::size_t i = 0; i < s.consumers.size(); ++i) {
        const auto& c = s.consumers[i];
        const std::string path = "network.consumers[" + std::to_string(i) + "]";
        if (!consumer_ids.insert(c.id).second)
            errors.push_back(path + ".id: duplicate consumer id `" + c.id + "`");
        if (!node_names.count(c.node))
            errors.push_back(path + ".node: unknown node `" + c.node + "`");
        if (!s.nodes.empty() && c.node == s.nodes.front())
            errors.push_back(path + ".node: consumers cannot sit on the root node");
        if (c.demand_key.empty())
            errors.push_back(path + ".demand: series key must not be empty");
        c.station.validate(path + ".station", errors);
    }

    s.storage.validate("storage", errors);

    ValveController ctrl;
    ctrl.gain_p = s.controller.gain_p;
    ctrl.gain_i = s.controller.gain_i;
    ctrl.schedule = s.controller.schedule;
    ctrl.position = s.controller.initial_position;
    ctrl.validate("controller", errors);

    if (!(s.pump.efficiency > 0.0 && s.pump.efficiency <= 1.0))
        errors.push_back("pump.efficiency: must be in (0, 1]");
    if (s.pump.constant_flow_kg_s && !(*s.pump.constant_flow_kg_s >= 0.0))
        errors.push_back("pump.constant_flow_kg_s: must be >= 0");

    if (!(s.integrator.dt_s > 0.0)) errors.push_back("integrator.dt_s: must be > 0");
    if (!(s.integrator.rel_tol > 0.0)) errors.push_back("integrator.rel_tol: must be > 0");
    if (!(s.integrator.abs_tol > 0.0)) errors.push_back("integrator.abs_tol: must be > 0");
    if (!(s.integrator.output_interval_s > 0.0))
        errors.push_back("integrator.output_interval_s: must be > 0");
    if (!(s.integrator.duration_s >= 0.0))
        errors.push_back("integrator.duration_s: must be >= 0");

    if (s.initial.pipe_soil_layer_temps_c) {
        for (const auto& run : s.runs) {
            if (static_cast<int>(s.initial.pipe_soil_layer_temps_c->size()) !=
                run.soil_layer_count) {
                errors.push_back(
                    "initial.pipe_soil_layer_temps_c: length must equal soil_layer_count "
                    "of every run");
                break;
            }
        }
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: JSON parse error: ") + e.what());
    }

    std::vector<std::string> errors;
    Reader r{errors};
    Scenario s;

    if (!j.is_object()) throw ValidationError("scenario: top level must be an object");

    if (const json* fluid = r.child(j, "scenario", "fluid", true))
        read_fluid(r, *fluid, s.fluid);
    if (const json* soil = r.child(j, "scenario", "soil", true))
        read_soil(r, *soil, "soil", s.soil);
    if (const json* water = r.child(j, "scenario", "water_constants", false))
        read_water(r, *water, s.water);
    if (const json* climate = r.child(j, "scenario", "boundary_climate", true)) {
        s.climate.min_temp_c = r.number(*climate, "boundary_climate", "min_temp_c",
                                        s.climate.min_temp_c, true);
        s.climate.max_temp_c = r.number(*climate, "boundary_climate", "max_temp_c",
                                        s.climate.max_temp_c, true);
        s.climate.year_start_offset_s =
            r.number(*climate, "boundary_climate", "year_start_offset_s", 0.0);
    }

    if (const json* network = r.child(j, "scenario", "network", true)) {
        if (const json* nodes = r.child(*network, "network", "nodes", true)) {
            if (!nodes->is_array()) {
                errors.push_back("network.nodes: expected an array of strings");
            } else {
                for (const auto& n : *nodes) {
                    if (n.is_string()) {
                        s.nodes.push_back(n.get<std::string>());
                    } else {
                        errors.push_back("network.nodes: expected an array of strings");
                    }
                }
            }
        }
        const json* defaults = r.child(*network, "network", "pipe_defaults", false);
        if (const json* runs = r.child(*network, "network", "runs", true)) {
            if (!runs->is_array()) {
                errors.push_back("network.runs: expected an array");
            } else {
                for (std::size_t i = 0; i < runs->size(); ++i) {
                    const std::string p = "network.runs[" + std::to_string(i) + "]";
                    if (!r.require_object((*runs)[i], p)) continue;
                    PipeRunConfig run;
                    read_run(r, (*runs)[i], p, defaults, run);
                    s.runs.push_back(std::move(run));
                }
            }
        }
        if (const json* consumers = r.child(*network, "network", "consumers", true)) {
            if (!consumers->is_array()) {
                errors.push_back("network.consumers: expected an array");
            } else {
                for (std::size_t i = 0; i < consumers->size(); ++i) {
                    const std::string p = "network.consumers[" + std::to_string(i) + "]";
                    const json& e = (*consumers)[i];
                    if (!r.require_object(e, p)) continue;
                    ConsumerConfig c;
                    c.id = r.text(e, p, "id", "", true);
                    c.node = r.text(e, p, "node", "", true);
                    c.demand_key = r.text(e, p, "demand", c.id);
                    if (const json* st = r.child(e, p, "station", false)) {
                        c.station.fluid_mass_kg = r.number(*st, p + ".station", "fluid_mass_kg",
                                                           c.station.fluid_mass_kg);
                        c.station.design_spread_k = r.number(
                            *st, p + ".station", "design_spread_k", c.station.design_spread_k);
                    }
                    s.consumers.push_back(std::move(c));
                }
            }
        }
    }

    if (const json* storage = r.child(j, "scenario", "storage", true)) {
        read_storage(r, *storage, s.soil, s.water, s.storage);
        s.storage_initial_temp_c =
            r.number(*storage, "storage", "initial_temp_c", s.storage_initial_temp_c);
    } else {
        s.storage.soil = s.soil;
        s.storage.water = s.water;
    }
    if (const json* controller = r.child(j, "scenario", "controller", true))
        read_controller(r, *controller, s.controller);
    if (const json* pump = r.child(j, "scenario", "pump", false)) {
        s.pump.efficiency = r.number(*pump, "pump", "efficiency", s.pump.efficiency);
        s.pump.constant_flow_kg_s = r.opt_number(*pump, "pump", "constant_flow_kg_s");
    }
    if (const json* integrator = r.child(j, "scenario", "integrator", false))
        read_integrator(r, *integrator, s.integrator);
    if (const json* initial = r.child(j, "scenario", "initial", false)) {
        s.initial.network_temp_c = r.opt_number(*initial, "initial", "network_temp_c");
        s.initial.storage_temp_c = r.opt_number(*initial, "initial", "storage_temp_c");
        if (const json* layers = r.child(*initial, "initial", "pipe_soil_layer_temps_c", false)) {
            if (!layers->is_array()) {
                errors.push_back("initial.pipe_soil_layer_temps_c: expected an array");
            } else {
                std::vector<double> temps;
                for (const auto& v : *layers) {
                    if (v.is_number()) {
                        temps.push_back(v.get<double>());
                    } else {
                        errors.push_back("initial.pipe_soil_layer_temps_c: expected numbers");
                    }
                }
                s.initial.pipe_soil_layer_temps_c = std::move(temps);
            }
        }
    }
    s.demands_file = r.text(j, "scenario", "demands_file", "");

    validate_scenario(s, errors);
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return s;
}

} // namespace dhnet
