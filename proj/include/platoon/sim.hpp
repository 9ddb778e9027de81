#pragma once

// Fixed-step forward simulation of the full fleet: the CAV follows its
// control schedule, HDVs follow the delayed car-following law, and both are
// subject to the speed/acceleration box constraints.
//
// Integrator: semi-implicit Euler. Per step: raw accelerations, clamp to
// [u_min, u_max], v <- clamp(v + u*dt, v_min, v_max), realized accel
// recomputed as (v_new - v_old)/dt so recorded u stays consistent with
// recorded v, then p <- p + v_new*dt.

#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/core.hpp"
#include "platoon/hdv.hpp"

namespace platoon {

enum class Phase { PreControl, Transition, Stabilization, PostZone };

const char* phase_name(Phase phase);

// Column-oriented state history for the whole run. Vehicle-indexed series
// hold one vector per vehicle; delta/headway are NaN for the lead vehicle.
struct Trajectory {
    double dt = 0.01;  // s
    std::vector<double> t;       // per step
    std::vector<Phase> phase;    // per step
    std::vector<std::vector<double>> p;        // [vehicle][step], m
    std::vector<std::vector<double>> v;        // m/s
    std::vector<std::vector<double>> u;        // m/s^2 (realized; 0 on the final row)
    std::vector<std::vector<double>> s;        // m, dynamic spacing
    std::vector<std::vector<double>> delta;    // m, platoon gap
    std::vector<std::vector<double>> headway;  // m, p_{i-1} - p_i

    std::size_t steps() const { return t.size(); }
    std::size_t fleet() const { return p.size(); }
};

// Thrown when a bumper-to-bumper gap reaches zero; the run aborts.
struct CollisionError : std::runtime_error {
    CollisionError(const std::string& msg, double when, std::size_t follower)
        : std::runtime_error(msg), time(when), follower_index(follower) {}
    double time;                  // s
    std::size_t follower_index;   // 0-based index of the rear vehicle of the pair
};

struct SimState {
    double time = 0.0;  // s
    FleetSnapshot snapshot;
    std::vector<DelayHistory> histories;  // one per vehicle (CAV's carries delta = +inf)
    ControlPlan plan;
    Phase phase = Phase::PreControl;
};

// Builds the t_c state: steady fleet, histories prefilled with eta_bar
// seconds of the steady pre-entry state (the delayed law needs history
// before t_c; upstream steady flow supplies it).
SimState init_sim(const ScenarioConfig& config, const ControlPlan& plan);

// Advances one dt. Throws CollisionError on contact; std::runtime_error if
// the CAV leaves the control zone before t_s (plan/zone mismatch).
void step(SimState& sim, const ScenarioConfig& config);

// Runs from t_c for `horizon` seconds and returns the full trajectory with
// derived spacing/gap/headway series and phase markers.
Trajectory run(const ScenarioConfig& config, const ControlPlan& plan, double horizon);

// Planned-formation-time horizon plus the configured margin.
double default_horizon(const ScenarioConfig& config, const ControlPlan& plan);

}  // namespace platoon
