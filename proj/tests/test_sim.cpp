#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "platoon/controller.hpp"
#include "platoon/core.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"

using namespace platoon;

namespace {

ScenarioConfig fixture_like() {
    ScenarioConfig cfg;
    VehicleParams cav;
    cav.kind = VehicleKind::CAV;
    VehicleParams h;
    h.kind = VehicleKind::HDV;
    h.eta = 0.03;
    cfg.vehicles = {{cav, {0.0, 20.0, 0.0}},
                    {h, {-137.55, 20.0, 0.0}},
                    {h, {-275.10, 20.0, 0.0}}};
    return cfg;
}

Trajectory run_fixture(const ScenarioConfig& cfg) {
    const FleetSnapshot snap = make_steady_state_fleet(cfg);
    const ControlPlan cp = plan(cfg, snap, cfg.t_p);
    return run(cfg, cp, default_horizon(cfg, cp));
}

}  // namespace

TEST_CASE("first step: CAV brakes, steady HDVs see no stimulus yet") {
    const ScenarioConfig cfg = fixture_like();
    const FleetSnapshot snap = make_steady_state_fleet(cfg);
    const ControlPlan cp = plan(cfg, snap, cfg.t_p);
    SimState sim = init_sim(cfg, cp);
    step(sim, cfg);
    CHECK(sim.snapshot.states[0].speed ==
          doctest::Approx(20.0 + cp.u_p * cfg.dt).epsilon(1e-14));
    // Far upstream, both tanh terms are saturated: the car-following target
    // equals v_max, so steady followers stay exactly steady.
    CHECK(sim.snapshot.states[1].speed == 20.0);
    CHECK(sim.snapshot.states[2].speed == 20.0);
    CHECK(sim.snapshot.states[1].position == doctest::Approx(-137.55 + 20.0 * cfg.dt));
}

TEST_CASE("trajectory series are self-consistent") {
    const ScenarioConfig cfg = fixture_like();
    const Trajectory traj = run_fixture(cfg);
    REQUIRE(traj.fleet() == 3);
    REQUIRE(traj.steps() > 100);

    // Time grid is exact.
    for (std::size_t k = 0; k < traj.steps(); ++k)
        CHECK(traj.t[k] == doctest::Approx(cfg.t_c + k * cfg.dt).epsilon(1e-12));

    for (std::size_t i = 0; i < traj.fleet(); ++i) {
        for (std::size_t k = 0; k + 1 < traj.steps(); ++k) {
            // Recorded u is the realized accel over [t_k, t_k+dt).
            CHECK(std::fabs((traj.v[i][k + 1] - traj.v[i][k]) - traj.u[i][k] * cfg.dt) <=
                  1e-10);
            CHECK(std::fabs((traj.p[i][k + 1] - traj.p[i][k]) - traj.v[i][k + 1] * cfg.dt) <=
                  1e-8);
        }
        CHECK(traj.u[i].back() == 0.0);
    }

    // Derived columns match their definitions.
    for (std::size_t i = 1; i < traj.fleet(); ++i) {
        for (std::size_t k = 0; k < traj.steps(); k += 97) {
            const double head = traj.p[i - 1][k] - traj.p[i][k];
            CHECK(std::fabs(traj.headway[i][k] - head) <= 1e-12);
            CHECK(std::fabs(traj.delta[i][k] -
                            (head - traj.s[i][k] - cfg.vehicles[i].first.length)) <= 1e-12);
        }
    }
    CHECK(std::isnan(traj.delta[0][0]));
    CHECK(std::isnan(traj.headway[0][0]));
}

TEST_CASE("box constraints hold on every recorded row") {
    const ScenarioConfig cfg = fixture_like();
    const Trajectory traj = run_fixture(cfg);
    const double tol = 1e-9;
    for (std::size_t i = 0; i < traj.fleet(); ++i) {
        for (std::size_t k = 0; k < traj.steps(); ++k) {
            CHECK(traj.v[i][k] >= cfg.road.v_min - tol);
            CHECK(traj.v[i][k] <= cfg.road.v_max + tol);
            CHECK(traj.u[i][k] >= cfg.road.u_min - tol);
            CHECK(traj.u[i][k] <= cfg.road.u_max + tol);
        }
    }
}

TEST_CASE("phase markers follow the schedule") {
    const ScenarioConfig cfg = fixture_like();
    const FleetSnapshot snap = make_steady_state_fleet(cfg);
    const ControlPlan cp = plan(cfg, snap, cfg.t_p);
    const Trajectory traj = run(cfg, cp, default_horizon(cfg, cp));
    const auto k_s = static_cast<std::size_t>(std::lround((cp.t_s - cfg.t_c) / cfg.dt));
    CHECK(traj.phase.front() == Phase::Transition);
    CHECK(traj.phase[k_s] == Phase::Transition);        // boundary belongs to the brake leg
    CHECK(traj.phase[k_s + 1] == Phase::Stabilization);
    CHECK(phase_name(Phase::PostZone) == std::string("PostZone"));
}

TEST_CASE("runs are deterministic") {
    const ScenarioConfig cfg = fixture_like();
    const Trajectory a = run_fixture(cfg);
    const Trajectory b = run_fixture(cfg);
    REQUIRE(a.steps() == b.steps());
    for (std::size_t i = 0; i < a.fleet(); ++i) {
        CHECK(a.p[i] == b.p[i]);
        CHECK(a.v[i] == b.v[i]);
        CHECK(a.u[i] == b.u[i]);
    }
}

TEST_CASE("a sluggish follower tailgating a hard-braking lead collides") {
    ScenarioConfig cfg;
    cfg.road.v_min = 0.1;
    cfg.road.u_min = -6.0;
    VehicleParams cav;
    cav.kind = VehicleKind::CAV;
    VehicleParams h;
    h.kind = VehicleKind::HDV;
    h.alpha = 0.01;  // barely reacts within the horizon
    cfg.vehicles = {{cav, {0.0, 20.0, 0.0}}, {h, {-32.0, 20.0, 0.0}}};

    ControlPlan cp;  // hand-built schedule: full brake through t_s
    cp.u_p = -6.0;
    cp.t_c = 0.0;
    cp.tau_t = 3.3;
    cp.tau_s = 5.0;
    cp.t_s = 3.3;
    cp.t_f = 1e6;
    cp.v_eq_planned = 0.2;

    try {
        run(cfg, cp, 5.0);
        FAIL("expected a collision");
    } catch (const CollisionError& e) {
        CHECK(e.follower_index == 1);
        CHECK(e.time > 0.0);
        CHECK(e.time < 5.0);
    }
}

TEST_CASE("leaving the zone during the brake leg is a plan/zone mismatch") {
    ScenarioConfig cfg = fixture_like();
    cfg.road.control_length = 100.0;
    ControlPlan cp;
    cp.u_p = -0.01;
    cp.t_c = 0.0;
    cp.tau_t = 20.0;
    cp.tau_s = 5.0;
    cp.t_s = 20.0;
    cp.t_f = 1e6;
    cp.v_eq_planned = 19.8;
    CHECK_THROWS_AS(run(cfg, cp, 10.0), std::runtime_error);
}

TEST_CASE("the CAV recovers toward free flow after leaving the zone") {
    ScenarioConfig cfg = fixture_like();
    ControlPlan cp;
    cp.u_p = -6.0;
    cp.t_c = 0.0;
    cp.tau_t = 0.2;
    cp.tau_s = 5.0;
    cp.t_s = 0.2;
    cp.t_f = 0.5;
    cp.v_eq_planned = 18.8;
    const Trajectory traj = run(cfg, cp, 10.0);
    const auto k_f = static_cast<std::size_t>(std::lround(0.5 / cfg.dt));
    CHECK(traj.v[0][k_f] < 19.0);
    CHECK(traj.v[0].back() > traj.v[0][k_f]);
    CHECK(traj.v[0].back() <= cfg.road.v_max);
    CHECK(traj.phase.back() == Phase::PostZone);
}

TEST_CASE("default horizon spans the planned formation plus the margin") {
    const ScenarioConfig cfg = fixture_like();
    const FleetSnapshot snap = make_steady_state_fleet(cfg);
    const ControlPlan cp = plan(cfg, snap, cfg.t_p);
    CHECK(default_horizon(cfg, cp) == doctest::Approx(47.2 + 15.0));
}
