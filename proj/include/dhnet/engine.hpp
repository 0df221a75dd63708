#pragma once

#include "dhnet/ground.hpp"
#include "dhnet/hydraulics.hpp"
#include "dhnet/icestore.hpp"
#include "dhnet/pipe.hpp"
#include "dhnet/scenario.hpp"
#include "dhnet/timeseries.hpp"
#include "dhnet/trajectory.hpp"

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dhnet {

// How a slot's heat capacity is evaluated for energy bookkeeping:
// constant slots carry C directly, soil slots carry the volume and water
// slots the layer mass, with the temperature-dependent capacity applied.
enum class CapacityKind { constant, pipe_soil, storage_soil, storage_water };

struct StateSlot {
    std::string name;
    CapacityKind kind = CapacityKind::constant;
    double factor = 0.0;
};

class StateRegistry {
  public:
    int add(std::string name, CapacityKind kind, double factor);
    int size() const { return static_cast<int>(slots_.size()); }
    const StateSlot& slot(int i) const { return slots_[i]; }
    const std::vector<StateSlot>& slots() const { return slots_; }
    int index_of(const std::string& name) const;

  private:
    std::vector<StateSlot> slots_;
    std::unordered_map<std::string, int> index_;
};

// Controls held constant over one sampling interval.
struct Controls {
    double valve_position = 0.0;
    ControlMode mode = ControlMode::heating;
};

struct RhsDiagnostics {
    double supply_temp_c = 0.0;
    double return_temp_c = 0.0;
    double storage_outlet_c = 0.0;
    double mdot_network_kg_s = 0.0;
    double mdot_storage_kg_s = 0.0;
    double mdot_bypass_kg_s = 0.0;
    double dp_total_pa = 0.0;
    double pump_power_w = 0.0;
    double station_injection_w = 0.0; // sum of q_hhx in state-equation sign
    double boundary_outflow_w = 0.0;  // to the far-field boundary, pipes + storage
    double unapportioned_pipe_heat_w = 0.0;
    double boundary_temp_c = 0.0;
    double water_mean_c = 0.0;
    double ice_fraction_mean = 0.0;
};

struct Workspace {
    std::vector<double> station_q_w;
    std::vector<double> station_mdot;
    std::vector<double> node_flow;
    std::vector<double> node_supply_c;
    std::vector<double> node_return_c;
    std::vector<double> q_hx_ext, q_hx_reg, q_hx_sum, q_w_c, q_c_s;
};

class NetworkModel {
  public:
    struct SegmentBlock {
        PipeSegmentParams pipe;
        SoilColumnParams soil;
        double pipe_soil_cond_w_k = 0.0;
        int sup_tf = -1, sup_tp = -1, ret_tf = -1, ret_tp = -1;
        int soil_base = -1; // 4*n_s: sup outer, sup adjacent, ret outer, ret adjacent
    };
    struct RunBlock {
        std::string id;
        int from_node = -1, to_node = -1;
        std::vector<SegmentBlock> segments;
    };
    struct StationBlock {
        std::string id;
        int node = -1;
        StationParams params;
        StepSeries demand; // external sign convention
        int slot = -1;
    };
    struct StorageBlock {
        IceStorageParams params;
        IceStorageGeometry geom;
        int ext_base = -1, reg_base = -1, water_base = -1, concrete_base = -1,
            soil_base = -1;
        int outlet_offset = 0; // layer index of the hydraulic outlet
    };
    struct NodeBlock {
        std::string name;
        int parent_node = -1; // tree edge = this node's parent run
        int parent_run = -1;
        std::vector<int> child_runs;
        std::vector<int> stations;
    };

    const StateRegistry& registry() const { return registry_; }
    int state_size() const { return registry_.size(); }

    Workspace make_workspace() const;

    // Derivative of the full state; pure in (x, t, controls). Throws
    // EngineError when any derivative is non-finite, naming the slot.
    void rhs(std::span<const double> x, double t, const Controls& controls, Workspace& ws,
             std::span<double> dxdt, RhsDiagnostics* diag = nullptr) const;

    // Heat capacity attributed to a slot at its current temperature.
    double capacity_j_k(int slot, double temp_c) const;

    // Sum of capacity * derivative over all slots, for energy audits.
    double energy_rate_w(std::span<const double> x, std::span<const double> dxdt) const;

    // Smallest diagonal time constant, estimated by a one-sided difference
    // probe of every state. Used for the startup step-size warning.
    double min_time_constant_s(std::span<const double> x, double t,
                               const Controls& controls) const;

    const FluidProps& fluid() const { return fluid_; }
    const BoundaryClimate& climate() const { return climate_; }
    const StorageBlock& storage() const { return storage_; }
    const std::vector<RunBlock>& runs() const { return runs_; }
    const std::vector<StationBlock>& stations() const { return stations_; }

  private:
    friend struct ModelBuilder;

    FluidProps fluid_;
    SoilProps soil_;
    WaterConstants water_;
    BoundaryClimate climate_;
    PumpConfig pump_;
    StorageBlock storage_;
    std::vector<NodeBlock> nodes_;
    std::vector<RunBlock> runs_;
    std::vector<StationBlock> stations_;
    std::vector<int> run_topo_;        // parents before children
    std::vector<int> node_parent_;     // per node, for route_mass_flows
    StateRegistry registry_;
};

struct Assembled {
    NetworkModel model;
    std::vector<double> initial_state;
};

// Builds the state layout and component blocks from a validated scenario.
// Throws ValidationError for topology defects (cycles, unreachable nodes,
// missing demand series, consumer-free leaves).
Assembled assemble(const Scenario& scenario, const DemandSet& demands);

// Per-interval hook replacing the built-in PI controller (tests, studies).
using ControlHook = std::function<void(double t, const RhsDiagnostics&, Controls&)>;

struct IntegrateOptions {
    IntegratorConfig config;
    ControlHook control_hook; // optional
    bool warn_stiffness = true;
    // persist every Nth boundary snapshot (the controller still samples at
    // every output boundary); the final state is always recorded
    int snapshot_stride = 1;
};

// Sampled-data simulation loop: controls held over each output interval,
// controller updated at the boundaries, snapshots appended per boundary.
Trajectory integrate(const NetworkModel& model, const Scenario& scenario,
                     std::span<const double> x0, const IntegrateOptions& options);

// Single-problem integrators used by the engine and exposed for tests.
// f(t, x, dxdt) evaluates the derivative.
using OdeFunction = std::function<void(double, std::span<const double>, std::span<double>)>;

void euler_fixed(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
                 double dt);
void rk4_fixed(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
               double dt);

// Dormand-Prince 5(4) with PI step control. names(i) labels the worst state
// in step-underflow errors.
void rk45_adaptive(const OdeFunction& f, std::vector<double>& x, double t0, double t1,
                   double h_init, double rel_tol, double abs_tol,
                   const std::function<std::string(int)>& names);

} // namespace dhnet
