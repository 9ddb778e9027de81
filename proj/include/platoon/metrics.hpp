#pragma once

// Event detection and outcome metrics: per-pair steady-state test, the
// transition-completion time (all platoon gaps closed), the actual formation
// time (gaps coupled AND speeds matched, sustained for a dwell window), and
// the formation-deviation percentage.

#include <optional>
#include <string>
#include <vector>

#include "platoon/core.hpp"
#include "platoon/sim.hpp"

namespace platoon {

// Outcome of the formation detector on one trajectory.
struct FormationReport {
    std::optional<double> t_s_actual;     // s, first time every platoon gap <= 0
    std::optional<double> t_ap;           // s, actual formation time (empty = NotReached)
    std::optional<double> deviation_pct;  // (t_ap - t_p)/t_p * 100
    std::optional<double> v_eq_observed;  // m/s, mean v_1 over [t_ap, t_ap + dwell]
    bool in_zone = false;                 // p_1(t_ap) <= L_c
    std::string not_reached_reason;       // which condition failed longest, when NotReached
};

// Per-pair steady-state flags at time t: pair i is steady iff its platoon
// gap moved at most eps_delta over the trailing dwell window and the pair's
// relative speed stayed within eps_v throughout it. Throws if t - dwell
// precedes the trajectory.
std::vector<bool> steady_state_check(const Trajectory& traj, double t,
                                     const FormationTolerances& tol);

// First time every follower's platoon gap is <= 0, linearly interpolated
// between the bracketing steps. Empty = no crossing within the horizon.
std::optional<double> detect_transition(const Trajectory& traj);

// Earliest t such that for every follower: delta_i <= eps_delta and
// |v_i - v_1| <= eps_v hold continuously on [t, t + dwell]. Also records the
// transition time, the observed equilibrium speed, the deviation against the
// planned formation time t_p, and the zone check against L_c.
FormationReport detect_formation(const Trajectory& traj, const FormationTolerances& tol,
                                 double t_p, double L_c);

// Signed percentage (t_ap - t_p)/t_p * 100; positive = late.
double formation_deviation(double t_ap, double t_p);

// Largest per-pair standard deviation of the headway over [t_end - window,
// t_end]; the time-invariance measure for a settled platoon.
double max_headway_std(const Trajectory& traj, double window);

}  // namespace platoon
