#include "dhnet/hydraulics.hpp"

#include "dhnet/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace dhnet;

TEST_CASE("station rhs hand cases") {
    StationParams p{10.0, 3.0};
    CHECK(station_rhs(p, 4182.0, 8.0, 8.0, 0.5, 0.0) == doctest::Approx(0.0));
    CHECK(station_rhs(p, 4182.0, 8.0, 8.0, 0.0, 418.2) == doctest::Approx(0.01).epsilon(1e-12));
    // linear in the injected heat
    const double base = station_rhs(p, 4182.0, 8.0, 10.0, 0.4, 500.0) -
                        station_rhs(p, 4182.0, 8.0, 10.0, 0.4, 0.0);
    const double twice = station_rhs(p, 4182.0, 8.0, 10.0, 0.4, 1000.0) -
                         station_rhs(p, 4182.0, 8.0, 10.0, 0.4, 0.0);
    CHECK(twice == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("station mass flow from the design spread") {
    CHECK(station_mass_flow_kg_s(4182.0, 2.0, 0.0) == 0.0);
    CHECK(station_mass_flow_kg_s(4182.0, 2.0, 4182.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(station_mass_flow_kg_s(4182.0, 2.0, -4182.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mixing valve splits and mixes") {
    const ValveSplit full = mixing_valve(1.0, 2.0, 4.0, 10.0);
    CHECK(full.mdot_bypass_kg_s == 0.0);
    CHECK(full.supply_temp_c == doctest::Approx(4.0));

    const ValveSplit closed = mixing_valve(0.0, 2.0, 4.0, 10.0);
    CHECK(closed.mdot_storage_kg_s == 0.0);
    CHECK(closed.supply_temp_c == doctest::Approx(10.0));

    const ValveSplit half = mixing_valve(0.5, 2.0, 4.0, 0.0);
    CHECK(half.supply_temp_c == doctest::Approx(2.0).epsilon(1e-12));

    const ValveSplit idle = mixing_valve(0.7, 0.0, 4.0, 10.0);
    CHECK(idle.supply_temp_c == doctest::Approx(10.0)); // bypass temp at zero flow

    // exact flow split and bounded mixed temperature for arbitrary positions
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double y = u(rng);
        const double mdot = 5.0 * u(rng);
        const double t_st = -5.0 + 30.0 * u(rng);
        const double t_bp = -5.0 + 30.0 * u(rng);
        const ValveSplit s = mixing_valve(y, mdot, t_st, t_bp);
        // bypass is defined as the remainder, so the sum reconstructs the
        // network flow to the last ulp
        CHECK(s.mdot_storage_kg_s + s.mdot_bypass_kg_s ==
              doctest::Approx(mdot).epsilon(1e-15));
        if (mdot > 0.0) {
            CHECK(s.supply_temp_c >= std::min(t_st, t_bp) - 1e-12);
            CHECK(s.supply_temp_c <= std::max(t_st, t_bp) + 1e-12);
        }
    }
}

namespace {

ValveController make_controller(double kp, double ki) {
    ValveController c;
    c.gain_p = kp;
    c.gain_i = ki;
    c.schedule = {{0, 5.0, ControlMode::heating}};
    return c;
}

} // namespace

TEST_CASE("pi step: no error means no movement, saturation holds") {
    ValveController c = make_controller(0.1, 0.01);
    c.position = 0.4;
    pi_step(c, 5.0, 0.0, 60.0); // primes prev error at e = 0
    CHECK(c.position == doctest::Approx(0.4));
    pi_step(c, 5.0, 60.0, 60.0);
    CHECK(c.position == doctest::Approx(0.4));

    c.position = 1.0;
    pi_step(c, 0.0, 120.0, 60.0); // large positive error, already saturated
    CHECK(c.position == 1.0);

    c.position = 0.0;
    pi_step(c, 20.0, 180.0, 60.0); // negative error at the lower clamp
    CHECK(c.position == 0.0);
}

TEST_CASE("pi closed loop settles on a static plant") {
    // plant: T = 10 y. Velocity-form PI on a gain-10 plant is stable only for
    // K_p * 10 < 1, so the loop is exercised at K_p = 0.05.
    ValveController c = make_controller(0.05, 0.01);
    double y = 0.0;
    int settled_since = -1;
    for (int k = 0; k < 2000; ++k) {
        const double measured = 10.0 * y;
        y = pi_step(c, measured, k * 1.0, 1.0);
        if (std::abs(5.0 - 10.0 * y) < 0.05) {
            if (settled_since < 0) settled_since = k;
        } else {
            settled_since = -1;
        }
    }
    CHECK(settled_since >= 0);
    CHECK(std::abs(5.0 - 10.0 * y) < 0.05);
}

TEST_CASE("velocity-form increments scale with the gains") {
    ValveController a = make_controller(0.02, 1e-3);
    ValveController b = make_controller(0.04, 2e-3);
    a.position = b.position = 0.5;
    pi_step(a, 4.0, 0.0, 10.0);
    pi_step(b, 4.0, 0.0, 10.0);
    const double da = a.position - 0.5;
    const double db = b.position - 0.5;
    CHECK(db == doctest::Approx(2.0 * da).epsilon(1e-12));
}

TEST_CASE("regeneration mode flips the tracking error") {
    ValveController c = make_controller(0.05, 1e-3);
    c.schedule = {{0, 16.0, ControlMode::regeneration}};
    c.position = 0.5;
    // network warmer than the setpoint: open the storage further
    pi_step(c, 20.0, 0.0, 60.0);
    CHECK(c.position > 0.5);
    // colder: close
    ValveController c2 = make_controller(0.05, 1e-3);
    c2.schedule = {{0, 16.0, ControlMode::regeneration}};
    c2.position = 0.5;
    pi_step(c2, 10.0, 0.0, 60.0);
    CHECK(c2.position < 0.5);
}

TEST_CASE("schedule lookup wraps around the year") {
    ValveController c;
    c.schedule = {{120, 16.0, ControlMode::regeneration}, {274, 4.0, ControlMode::heating}};
    c.year_start_offset_s = 0.0;
    // day 10 (before the first entry): the last entry wraps from the previous year
    CHECK(schedule_entry(c, 10.0 * 86400.0).setpoint_c == doctest::Approx(4.0));
    CHECK(schedule_entry(c, 150.0 * 86400.0).setpoint_c == doctest::Approx(16.0));
    CHECK(schedule_entry(c, 300.0 * 86400.0).setpoint_c == doctest::Approx(4.0));
    // offset moves the simulated origin to December
    c.year_start_offset_s = 334.0 * 86400.0;
    CHECK(schedule_entry(c, 0.0).setpoint_c == doctest::Approx(4.0));
    CHECK(schedule_entry(c, 200.0 * 86400.0).mode == ControlMode::regeneration);
}

TEST_CASE("pump power hand case and validation") {
    CHECK(pump_power_w(0.0, 2.0, 1000.0, 0.5) == 0.0);
    CHECK(pump_power_w(1e5, 2.0, 1000.0, 0.5) == doctest::Approx(400.0).epsilon(1e-12));
    CHECK(pump_power_w(1e5, 2.0, 1000.0, 0.25) == doctest::Approx(800.0).epsilon(1e-12));
    CHECK_THROWS_AS(pump_power_w(1e5, 2.0, 1000.0, 0.0), std::invalid_argument);
}

TEST_CASE("mass-flow routing over trees") {
    // single path: root(0) <- 1 <- 2
    {
        std::vector<int> parent = {-1, 0, 1};
        std::vector<double> flows = {0.0, 0.0, 0.3};
        const auto subtree = route_mass_flows(parent, flows);
        CHECK(subtree[2] == doctest::Approx(0.3));
        CHECK(subtree[1] == doctest::Approx(0.3));
        CHECK(subtree[0] == doctest::Approx(0.3));
    }
    // two branches
    {
        std::vector<int> parent = {-1, 0, 0};
        std::vector<double> flows = {0.0, 0.2, 0.3};
        const auto subtree = route_mass_flows(parent, flows);
        CHECK(subtree[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    // random tree with 30 leaves vs brute-force sum
    std::mt19937 rng(11);
    const int n = 61;
    std::vector<int> parent(n, -1);
    std::vector<double> flows(n, 0.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int v = 1; v < n; ++v) {
        parent[v] = static_cast<int>(u(rng) * v); // parent among earlier nodes
        flows[v] = (v >= n - 30) ? u(rng) : 0.0;  // 30 "leaf" stations
    }
    const auto subtree = route_mass_flows(parent, flows);
    double total = 0.0;
    for (int v = 0; v < n; ++v) total += flows[v];
    CHECK(subtree[0] == doctest::Approx(total).epsilon(1e-12));
    // conservation at every junction: subtree = own + children sums
    for (int v = 0; v < n; ++v) {
        double sum = flows[v];
        for (int w = 1; w < n; ++w)
            if (parent[w] == v) sum += subtree[w];
        CHECK(subtree[v] == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("cyclic parent arrays are rejected") {
    std::vector<int> parent = {1, 0};
    std::vector<double> flows = {0.0, 0.0};
    CHECK_THROWS_AS(route_mass_flows(parent, flows), ValidationError);
    std::vector<int> bad_range = {-1, 5};
    CHECK_THROWS_AS(route_mass_flows(bad_range, flows), ValidationError);
}
