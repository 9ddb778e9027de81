#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace platoon {

namespace {

// Grid-boundary tie-break: schedule boundaries are continuous times while
// step times carry float rounding; a step landing within this slack of a
// boundary counts as inside it. Far smaller than any usable dt.
constexpr double kEdge = 1e-9;  // s

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

Phase phase_of(double t, const ControlPlan& plan) {
    if (t < plan.t_c - kEdge) return Phase::PreControl;
    if (t <= plan.t_s + kEdge) return Phase::Transition;
    if (t <= plan.t_f + kEdge) return Phase::Stabilization;
    return Phase::PostZone;
}

}  // namespace

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::PreControl: return "PreControl";
        case Phase::Transition: return "Transition";
        case Phase::Stabilization: return "Stabilization";
        case Phase::PostZone: return "PostZone";
    }
    return "?";
}

SimState init_sim(const ScenarioConfig& config, const ControlPlan& plan) {
    SimState sim;
    sim.snapshot = make_steady_state_fleet(config);
    sim.time = config.t_c;
    sim.plan = plan;
    sim.phase = phase_of(sim.time, plan);

    const std::size_t n = config.vehicles.size();
    sim.histories.reserve(n);
    // Steady pre-entry samples: the fleet cruised at v_max through the buffer
    // zone, so every perceived quantity was constant there.
    const std::size_t prefill = static_cast<std::size_t>(std::lround(config.eta_bar / config.dt)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        DelayHistory h(config.dt, config.eta_bar);
        const auto& params = config.vehicles[i].first;
        const double v = sim.snapshot.states[i].speed;
        const double s = dynamic_spacing(v, params, config.road.s0);
        const double delta =
            i == 0 ? kNoPredecessor
                   : sim.snapshot.states[i - 1].position - sim.snapshot.states[i].position - s -
                         params.length;
        for (std::size_t j = prefill; j >= 1; --j)
            h.record_sample(config.t_c - static_cast<double>(j) * config.dt, delta, s, v);
        h.record_sample(config.t_c, delta, s, v);
        sim.histories.push_back(std::move(h));
    }
    return sim;
}

void step(SimState& sim, const ScenarioConfig& config) {
    const std::size_t n = sim.snapshot.states.size();
    const double dt = config.dt;
    const double t = sim.time;
    const auto& road = config.road;

    // Raw accelerations.
    std::vector<double> u(n);
    {
        const auto cav_u = control_at(sim.plan, std::max(t, sim.plan.t_c));
        if (cav_u.has_value()) {
            u[0] = *cav_u;
        } else {
            // Past the zone the CAV free-flows under the car-following law.
            u[0] = ovm_accel(sim.histories[0], t, config.vehicles[0].first, road.v_max,
                             config.tanh_scale);
        }
    }
    for (std::size_t i = 1; i < n; ++i)
        u[i] = ovm_accel(sim.histories[i], t, config.vehicles[i].first, road.v_max,
                         config.tanh_scale);

    // Constraint enforcement and semi-implicit update.
    for (std::size_t i = 0; i < n; ++i) {
        auto& st = sim.snapshot.states[i];
        const double u_clamped = clamp(u[i], road.u_min, road.u_max);
        const double v_new = clamp(st.speed + u_clamped * dt, road.v_min, road.v_max);
        st.accel = (v_new - st.speed) / dt;  // realized accel consistent with v
        st.speed = v_new;
    }
    for (auto& st : sim.snapshot.states) st.position += st.speed * dt;

    sim.time = t + dt;
    sim.snapshot.time = sim.time;
    sim.phase = phase_of(sim.time, sim.plan);

    // Contact check on the updated positions.
    for (std::size_t i = 1; i < n; ++i) {
        const double bumper = sim.snapshot.states[i - 1].position -
                              sim.snapshot.states[i].position - config.vehicles[i].first.length;
        if (bumper <= 0.0) {
            std::ostringstream os;
            os << "collision at t=" << sim.time << " s: vehicle " << (i + 1)
               << " contacted its predecessor (bumper gap " << bumper << " m)";
            throw CollisionError(os.str(), sim.time, i);
        }
    }
    // The plan promises the CAV stays in the zone through the transition.
    if (sim.time <= sim.plan.t_s + kEdge &&
        sim.snapshot.states[0].position > road.control_length)
        throw std::runtime_error("CAV exited the control zone before t_s (plan/zone mismatch)");

    // Record what each driver will later perceive.
    for (std::size_t i = 0; i < n; ++i) {
        const auto& params = config.vehicles[i].first;
        const auto& st = sim.snapshot.states[i];
        const double s = dynamic_spacing(st.speed, params, road.s0);
        const double delta =
            i == 0 ? kNoPredecessor
                   : sim.snapshot.states[i - 1].position - st.position - s - params.length;
        sim.histories[i].record_sample(sim.time, delta, s, st.speed);
    }
}

Trajectory run(const ScenarioConfig& config, const ControlPlan& plan, double horizon) {
    const std::size_t n = config.vehicles.size();
    const std::size_t n_steps = static_cast<std::size_t>(std::lround(horizon / config.dt));

    Trajectory traj;
    traj.dt = config.dt;
    traj.t.reserve(n_steps + 1);
    traj.phase.reserve(n_steps + 1);
    auto series = [&] {
        std::vector<std::vector<double>> v(n);
        for (auto& col : v) col.reserve(n_steps + 1);
        return v;
    };
    traj.p = series();
    traj.v = series();
    traj.u = series();
    traj.s = series();
    traj.delta = series();
    traj.headway = series();

    SimState sim = init_sim(config, plan);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto record_row = [&](const SimState& state) {
        traj.t.push_back(state.time);
        traj.phase.push_back(state.phase);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& st = state.snapshot.states[i];
            traj.p[i].push_back(st.position);
            traj.v[i].push_back(st.speed);
            traj.u[i].push_back(0.0);  // realized accel patched in after the step
            traj.s[i].push_back(dynamic_spacing(st.speed, config.vehicles[i].first, config.road.s0));
            if (i == 0) {
                traj.delta[i].push_back(nan);
                traj.headway[i].push_back(nan);
            } else {
                const double head = state.snapshot.states[i - 1].position - st.position;
                traj.headway[i].push_back(head);
                traj.delta[i].push_back(head - traj.s[i].back() - config.vehicles[i].first.length);
            }
        }
    };

    record_row(sim);
    for (std::size_t k = 0; k < n_steps; ++k) {
        step(sim, config);
        for (std::size_t i = 0; i < n; ++i)
            traj.u[i][k] = sim.snapshot.states[i].accel;  // accel applied over [t_k, t_k+dt)
        record_row(sim);
        // Keep step times on the exact grid: accumulation drift would shift
        // schedule-boundary comparisons on long runs.
        sim.time = config.t_c + static_cast<double>(k + 1) * config.dt;
        sim.snapshot.time = sim.time;
        traj.t.back() = sim.time;
    }
    return traj;
}

double default_horizon(const ScenarioConfig& config, const ControlPlan& plan) {
    return plan.t_p() - config.t_c + config.horizon_extra;
}

}  // namespace platoon
