#include "dhnet/engine.hpp"

#include "dhnet/errors.hpp"
#include "support/builders.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace dhnet;
using namespace dhnet::testing;

TEST_CASE("minimal scenario assembles with the hand-counted state layout") {
    const Scenario s = minimal_scenario();
    const DemandSet demands = constant_demands({{"house1", 3000.0}});
    const Assembled a = assemble(s, demands);
    // storage: 2 strings x 2 + water 2 + concrete 2 + soil 2x2 = 12
    // run: 1 segment x (4 pipe states + 4 * 2 soil) = 12; station: 1
    CHECK(a.model.state_size() == 25);
    CHECK(a.initial_state.size() == 25);

    const StateRegistry& reg = a.model.registry();
    CHECK(reg.index_of("storage.hx_ext.1") == 0);
    CHECK(reg.index_of("storage.water.1") >= 0);
    CHECK(reg.index_of("run.main.seg1.sup.t_f") >= 0);
    CHECK(reg.index_of("run.main.seg1.soil.ret.adj.2") >= 0);
    CHECK(reg.index_of("station.house1.t_hhx") == 24);
    CHECK(reg.index_of("no.such.slot") == -1);

    // re-assembly yields the identical layout
    const Assembled b = assemble(s, demands);
    for (int i = 0; i < reg.size(); ++i)
        CHECK(reg.slot(i).name == b.model.registry().slot(i).name);
}

TEST_CASE("assembly rejects defective topologies") {
    const DemandSet demands = constant_demands({{"house1", 3000.0}});

    Scenario no_consumers = minimal_scenario();
    no_consumers.consumers.clear();
    CHECK_THROWS_AS(assemble(no_consumers, demands), ValidationError);

    Scenario cycle = minimal_scenario();
    cycle.runs.push_back(run_between("back", "house", "root", 25.0));
    CHECK_THROWS_AS(assemble(cycle, demands), ValidationError);

    Scenario disconnected = minimal_scenario();
    disconnected.nodes.push_back("island");
    disconnected.consumers.push_back(disconnected.consumers[0]);
    disconnected.consumers[1].id = "lost";
    disconnected.consumers[1].node = "island";
    CHECK_THROWS_AS(assemble(disconnected, demands), ValidationError);

    Scenario missing_series = minimal_scenario();
    missing_series.consumers[0].demand_key = "unknown";
    CHECK_THROWS_AS(assemble(missing_series, demands), ValidationError);

    Scenario double_feed = minimal_scenario();
    double_feed.nodes.push_back("mid");
    double_feed.runs.push_back(run_between("a", "root", "mid", 30.0));
    double_feed.runs.push_back(run_between("b", "mid", "house", 30.0));
    CHECK_THROWS_AS(assemble(double_feed, demands), ValidationError);
}

TEST_CASE("global equilibrium: all states at a constant boundary, no demand") {
    Scenario s = minimal_scenario();
    s.climate = {9.0, 9.0, 0.0}; // constant boundary
    s.initial.network_temp_c = 9.0;
    s.initial.storage_temp_c = 9.0;
    const DemandSet demands = constant_demands({{"house1", 0.0}});
    const Assembled a = assemble(s, demands);

    Workspace ws = a.model.make_workspace();
    std::vector<double> dxdt(a.model.state_size());
    Controls controls{0.5, ControlMode::heating};
    a.model.rhs(a.initial_state, 1000.0, controls, ws, dxdt);
    for (int i = 0; i < a.model.state_size(); ++i)
        CHECK(std::abs(dxdt[i]) < 1e-14);
}

TEST_CASE("flipping one consumer's demand sign only flips its own station term") {
    Scenario s = two_branch_scenario();
    s.climate = {9.0, 9.0, 0.0};
    const Assembled a = assemble(
        s, constant_demands({{"east_house", 2000.0}, {"west_house", 1000.0}}));
    const Assembled b = assemble(
        s, constant_demands({{"east_house", 2000.0}, {"west_house", -1000.0}}));

    Workspace ws = a.model.make_workspace();
    std::vector<double> da(a.model.state_size()), db(a.model.state_size());
    Controls controls{0.3, ControlMode::heating};
    // identical states for both evaluations
    std::vector<double> x = a.initial_state;
    a.model.rhs(x, 0.0, controls, ws, da);
    Workspace ws2 = b.model.make_workspace();
    b.model.rhs(x, 0.0, controls, ws2, db);

    const int west = a.model.registry().index_of("station.west_house.t_hhx");
    REQUIRE(west >= 0);
    // station flows are |q|-driven, so advection is unchanged; the q term flips
    const StationParams& params = a.model.stations()[1].params;
    const double c_f = a.model.fluid().specific_heat_j_kgk;
    const double q_term = 2.0 * 1000.0 / (params.fluid_mass_kg * c_f);
    CHECK(da[west] - db[west] == doctest::Approx(-q_term).epsilon(1e-9));
    const int east = a.model.registry().index_of("station.east_house.t_hhx");
    CHECK(da[east] == doctest::Approx(db[east]).epsilon(1e-12));
}

TEST_CASE("global energy audit holds on random states") {
    Scenario s = two_branch_scenario();
    const Assembled a = assemble(
        s, constant_demands({{"east_house", 4000.0}, {"west_house", -1500.0}}));
    Workspace ws = a.model.make_workspace();
    std::vector<double> x = a.initial_state;
    std::vector<double> dxdt(x.size());

    // perturb states deterministically
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += std::sin(0.7 * static_cast<double>(i)) * 6.0;

    for (double t : {0.0, 3600.0, 9e6}) {
        for (double y : {0.0, 0.37, 1.0}) {
            for (ControlMode mode : {ControlMode::heating, ControlMode::regeneration}) {
                Controls controls{y, mode};
                RhsDiagnostics diag;
                a.model.rhs(x, t, controls, ws, dxdt, &diag);
                const double lhs = a.model.energy_rate_w(x, dxdt);
                const double rhs = diag.station_injection_w - diag.boundary_outflow_w -
                                   diag.unapportioned_pipe_heat_w;
                double scale = std::abs(diag.station_injection_w) +
                               std::abs(diag.boundary_outflow_w) + 1.0;
                for (std::size_t i = 0; i < x.size(); ++i)
                    scale += std::abs(a.model.capacity_j_k(static_cast<int>(i), x[i]) * dxdt[i]);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("integrators reproduce the exponential") {
    const OdeFunction decay = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    std::vector<double> x = {1.0};
    rk4_fixed(decay, x, 0.0, 1.0, 0.1);
    CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-6);

    x = {1.0};
    euler_fixed(decay, x, 0.0, 1.0, 1e-4);
    CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-3);

    x = {1.0};
    rk45_adaptive(decay, x, 0.0, 1.0, 0.1, 1e-10, 1e-12, nullptr);
    CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("RK4 order: halving the step cuts the error ~16x") {
    const OdeFunction decay = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    const double exact = std::exp(-1.0);
    double prev_err = 0.0;
    int halvings = 0;
    for (double h : {0.1, 0.05, 0.025}) {
        std::vector<double> x = {1.0};
        rk4_fixed(decay, x, 0.0, 1.0, h);
        const double err = std::abs(x[0] - exact);
        if (halvings > 0) CHECK(prev_err / err >= 15.0);
        prev_err = err;
        ++halvings;
    }
}

TEST_CASE("Euler order: halving the step cuts the error ~2x") {
    const OdeFunction decay = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0];
    };
    const double exact = std::exp(-1.0);
    std::vector<double> errs;
    for (double h : {0.01, 0.005, 0.0025}) {
        std::vector<double> x = {1.0};
        euler_fixed(decay, x, 0.0, 1.0, h);
        errs.push_back(std::abs(x[0] - exact));
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
    CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("adaptive step underflow names the worst component") {
    // a derivative that explodes at t = 0.5 forces h below the floor
    const OdeFunction blow = [](double t, std::span<const double> x, std::span<double> dx) {
        dx[0] = x[0] / (0.5 - t);
    };
    std::vector<double> x = {1.0};
    CHECK_THROWS_AS(
        rk45_adaptive(blow, x, 0.0, 1.0, 0.1, 1e-9, 1e-9,
                      [](int) { return std::string("state.zero"); }),
        EngineError);
}

TEST_CASE("zero duration yields a single snapshot") {
    Scenario s = minimal_scenario();
    s.integrator.duration_s = 0.0;
    const Assembled a = assemble(s, constant_demands({{"house1", 1000.0}}));
    IntegrateOptions opt;
    opt.config = s.integrator;
    opt.warn_stiffness = false;
    const Trajectory traj = integrate(a.model, s, a.initial_state, opt);
    CHECK(traj.time_s.size() == 1);
    CHECK(traj.time_s[0] == 0.0);
    const int idx = traj.column_index("station.house1.t_hhx");
    REQUIRE(idx >= 0);
    const int station_slot = a.model.registry().index_of("station.house1.t_hhx");
    CHECK(traj.rows[0][idx] == a.initial_state[station_slot]);
}

TEST_CASE("short sampled run is deterministic and finite") {
    Scenario s = two_branch_scenario();
    s.integrator.duration_s = 6.0 * 3600.0;
    const DemandSet demands =
        constant_demands({{"east_house", 5000.0}, {"west_house", 2500.0}});
    const Assembled a = assemble(s, demands);
    IntegrateOptions opt;
    opt.config = s.integrator;
    opt.warn_stiffness = false;

    const Trajectory t1 = integrate(a.model, s, a.initial_state, opt);
    const Trajectory t2 = integrate(a.model, s, a.initial_state, opt);
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t i = 0; i < t1.rows.size(); ++i)
        for (std::size_t j = 0; j < t1.rows[i].size(); ++j)
            CHECK(t1.rows[i][j] == t2.rows[i][j]); // bit-identical

    // consuming heat cools the network side below its start
    const auto t_sup = t1.column("t_n_sup_c");
    CHECK(std::isfinite(t_sup.back()));
}

TEST_CASE("stations at interior nodes join the routing") {
    Scenario s = minimal_scenario();
    s.nodes = {"root", "mid", "leaf"};
    s.runs = {run_between("a", "root", "mid", 25.0), run_between("b", "mid", "leaf", 25.0)};
    s.consumers.clear();
    for (const char* node : {"mid", "leaf"}) {
        ConsumerConfig c;
        c.id = std::string(node) + "_house";
        c.node = node;
        c.station = {50.0, 3.0};
        c.demand_key = c.id;
        s.consumers.push_back(c);
    }
    const double c_f = s.fluid.specific_heat_j_kgk;
    const Assembled a = assemble(
        s, constant_demands({{"mid_house", 3000.0}, {"leaf_house", 1500.0}}));
    Workspace ws = a.model.make_workspace();
    std::vector<double> dxdt(a.model.state_size());
    RhsDiagnostics diag;
    a.model.rhs(a.initial_state, 0.0, Controls{0.5, ControlMode::heating}, ws, dxdt, &diag);
    const double expected = (3000.0 + 1500.0) / (c_f * 3.0);
    CHECK(diag.mdot_network_kg_s == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("valve position override series forces and releases") {
    Scenario s = minimal_scenario();
    s.integrator.duration_s = 1800.0;
    s.controller.initial_position = 0.0;
    s.controller.position_overrides = {{0.0, 0.75}, {600.0, std::nullopt}};
    const Assembled a = assemble(s, constant_demands({{"house1", 3000.0}}));
    IntegrateOptions opt;
    opt.config = s.integrator;
    opt.warn_stiffness = false;
    const Trajectory traj = integrate(a.model, s, a.initial_state, opt);
    const auto y = traj.column("valve_y");
    CHECK(y[0] == doctest::Approx(0.75)); // forced from t = 0
    CHECK(y[5] == doctest::Approx(0.75));
    // after the release the PI resumes from the forced position (bumpless)
    CHECK(std::abs(y[12] - 0.75) < 0.2);
}

TEST_CASE("heating demand cools the station below its inlet") {
    Scenario s = minimal_scenario();
    s.climate = {9.0, 9.0, 0.0};
    s.initial.network_temp_c = 9.0;
    s.initial.storage_temp_c = 9.0;
    s.integrator.duration_s = 2.0 * 3600.0;
    // external convention: positive = network supplies heat to the building
    const Assembled a = assemble(s, constant_demands({{"house1", 5000.0}}));
    IntegrateOptions opt;
    opt.config = s.integrator;
    opt.warn_stiffness = false;
    const Trajectory traj = integrate(a.model, s, a.initial_state, opt);
    const auto t_hhx = traj.column("station.house1.t_hhx");
    const auto t_sup = traj.column("t_n_sup_c");
    CHECK(t_hhx.back() < t_sup.back());
    CHECK(t_hhx.back() < 9.0);
}

TEST_CASE("constant-flow pump override rescales station flows") {
    Scenario s = two_branch_scenario();
    s.pump.constant_flow_kg_s = 1.25;
    const Assembled a = assemble(
        s, constant_demands({{"east_house", 4000.0}, {"west_house", 2000.0}}));
    Workspace ws = a.model.make_workspace();
    std::vector<double> dxdt(a.model.state_size());
    RhsDiagnostics diag;
    a.model.rhs(a.initial_state, 0.0, Controls{0.4, ControlMode::heating}, ws, dxdt, &diag);
    CHECK(diag.mdot_network_kg_s == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(diag.mdot_storage_kg_s == doctest::Approx(0.5).epsilon(1e-12));

    // zero demand: the override still circulates, split equally
    const Assembled b = assemble(
        s, constant_demands({{"east_house", 0.0}, {"west_house", 0.0}}));
    Workspace ws2 = b.model.make_workspace();
    b.model.rhs(b.initial_state, 0.0, Controls{0.0, ControlMode::heating}, ws2, dxdt, &diag);
    CHECK(diag.mdot_network_kg_s == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("per-layer initial soil temperatures are applied") {
    Scenario s = minimal_scenario();
    s.initial.pipe_soil_layer_temps_c = std::vector<double>{3.0, 7.5};
    const Assembled a = assemble(s, constant_demands({{"house1", 0.0}}));
    const StateRegistry& reg = a.model.registry();
    CHECK(a.initial_state[reg.index_of("run.main.seg1.soil.sup.outer.1")] == 3.0);
    CHECK(a.initial_state[reg.index_of("run.main.seg1.soil.sup.outer.2")] == 7.5);
    CHECK(a.initial_state[reg.index_of("run.main.seg1.soil.ret.adj.1")] == 3.0);

    // wrong length is rejected
    s.initial.pipe_soil_layer_temps_c = std::vector<double>{3.0};
    CHECK_THROWS_AS(assemble(s, constant_demands({{"house1", 0.0}})), ValidationError);
}

TEST_CASE("a control hook replaces the built-in controller") {
    Scenario s = minimal_scenario();
    s.integrator.duration_s = 1800.0;
    const Assembled a = assemble(s, constant_demands({{"house1", 3000.0}}));
    IntegrateOptions opt;
    opt.config = s.integrator;
    opt.warn_stiffness = false;
    opt.control_hook = [](double, const RhsDiagnostics&, Controls& c) {
        c.valve_position = 1.0;
        c.mode = ControlMode::heating;
    };
    const Trajectory traj = integrate(a.model, s, a.initial_state, opt);
    const auto y = traj.column("valve_y");
    // rows record the controls held over the preceding interval; the hook
    // first acts at the end of interval one
    CHECK(y[1] == 0.0);
    for (std::size_t i = 2; i < y.size(); ++i) CHECK(y[i] == 1.0);
}

TEST_CASE("fastest time-constant estimate tracks the stiffest state") {
    Scenario s = minimal_scenario();
    const Assembled a = assemble(s, constant_demands({{"house1", 3000.0}}));
    const double tau = a.model.min_time_constant_s(
        a.initial_state, 0.0, Controls{0.5, ControlMode::heating});
    CHECK(tau > 0.0);
    CHECK(tau < 1e5);
    // a much lighter station makes the system stiffer
    Scenario stiff = s;
    stiff.consumers[0].station.fluid_mass_kg = 0.5;
    const Assembled b = assemble(stiff, constant_demands({{"house1", 3000.0}}));
    const double tau_stiff = b.model.min_time_constant_s(
        b.initial_state, 0.0, Controls{0.5, ControlMode::heating});
    CHECK(tau_stiff < tau);
}

TEST_CASE("rk45 on the network matches rk4 closely") {
    Scenario s = minimal_scenario();
    s.integrator.duration_s = 2.0 * 3600.0;
    const DemandSet demands = constant_demands({{"house1", 4000.0}});
    const Assembled a = assemble(s, demands);

    IntegrateOptions rk4_opt;
    rk4_opt.config = s.integrator;
    rk4_opt.config.dt_s = 10.0;
    rk4_opt.warn_stiffness = false;
    const Trajectory ref = integrate(a.model, s, a.initial_state, rk4_opt);

    IntegrateOptions rk45_opt = rk4_opt;
    rk45_opt.config.method = IntegratorMethod::adaptive_rk45;
    rk45_opt.config.dt_s = 60.0;
    rk45_opt.config.rel_tol = 1e-8;
    rk45_opt.config.abs_tol = 1e-10;
    const Trajectory adaptive = integrate(a.model, s, a.initial_state, rk45_opt);

    REQUIRE(ref.rows.size() == adaptive.rows.size());
    const std::size_t first_state = ref.columns.size() - a.model.state_size();
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.rows.size(); ++i)
        for (std::size_t j = first_state; j < ref.columns.size(); ++j)
            worst = std::max(worst, std::abs(ref.rows[i][j] - adaptive.rows[i][j]));
    CHECK(worst < 1e-4);
}
