#pragma once

// Analytical lead-vehicle control: closed-form braking rate solvers, the
// feasibility interval for the transition duration, and assembly of the
// piecewise control schedule
//
//     u_1(t) = u_p            for t in [t_c, t_s]   (u_p in [u_min, 0))
//            = 0              for t in (t_s, t_f]
//            = car-following  for t >  t_f          (free flow, no predecessor)
//
// For a single follower the braking rate solves 2*delta_2(t_c) + u_p*tau_t^2 = 0;
// for a chain it solves 2*Delta(t_c) + u_p*tau_t^2 - 2*u_p*tau_t*C1 = 0 with
// C1 = sum of rho_j over the interior followers j = 2..N-1.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "platoon/core.hpp"

namespace platoon {

// The CAV's piecewise control schedule plus the feasibility interval it was
// validated against and reporting metadata.
struct ControlPlan {
    double u_p = 0.0;    // m/s^2, braking input during the transition (< 0)
    double t_c = 0.0;    // s
    double t_s = 0.0;    // s, = t_c + tau_t
    double t_f = 0.0;    // s, planned control-zone exit
    double tau_t = 0.0;  // s, transition duration
    double tau_s = 0.0;  // s, stabilization duration
    std::pair<double, double> feasible_interval{0.0, 0.0};  // (tau_lo, tau_hi) s
    double gap_solved = 0.0;     // m, the delta_2 or Delta the plan was solved against
    double rho_sum = 0.0;        // s, C1 used
    double v_eq_planned = 0.0;   // m/s, v_1(t_c) + u_p * tau_t (outcome, not a target)

    double t_p() const { return t_c + tau_t + tau_s; }  // planned formation time
};

// Inputs to the feasibility interval computation.
struct FeasibilityInputs {
    double delta_or_Delta = 0.0;  // m, delta_2(t_c) for N=2, Delta(t_c) for N>2
    double v1_tc = 0.0;           // m/s, CAV speed at t_c
    double rho_sum = 0.0;         // s, C1 (zero when N=2)
    double L_c = 0.0;             // m, control-zone length
    double u_min = 0.0;           // m/s^2 (< 0)
    double v_min = 0.0;           // m/s
    double tau_s = 0.0;           // s
};

// Thrown when a requested transition duration falls outside the feasibility
// interval; `binding` names the violated bound.
struct InfeasibleError : std::runtime_error {
    InfeasibleError(const std::string& msg, std::string which)
        : std::runtime_error(msg), binding(std::move(which)) {}
    std::string binding;  // "u_min bound" | "v_min bound" | "control zone bound" | "empty interval"
};

// tau_s = eta_bar + tau_r: the time budgeted for speeds to equilibrate after
// the last gap closes.
double stabilization_duration(double eta_bar, double tau_r);

// Braking rate for a single follower: u_p = -2*delta2/tau_t^2.
// Throws std::invalid_argument on delta2_tc <= 0 ("already platooned") or
// tau_t <= 0.
double solve_up_two(double delta2_tc, double tau_t);

// Braking rate for a chain: u_p = -2*Delta / (tau_t^2 - 2*tau_t*C1).
// With rho_sum == 0 this reduces to solve_up_two bit-for-bit.
// Throws std::invalid_argument on Delta_tc <= 0 or tau_t <= 2*rho_sum.
double solve_up_multi(double Delta_tc, double tau_t, double rho_sum);

// Feasible transition-duration interval (tau_lo, tau_hi) for one follower:
//   tau_lo = max( sqrt(-2*delta2/u_min), 2*delta2/(v1 - v_min) )
//   tau_hi = (phi1 + sqrt(phi1^2 + 4*phi2)) / 2
// An empty interval (tau_lo > tau_hi) is a valid verdict, not an error.
// Requires rho_sum == 0; throws std::invalid_argument otherwise or when
// v1 <= v_min.
std::pair<double, double> feasible_range_two(const FeasibilityInputs& in);

// Chain version with C1 = rho_sum, C2 = L_c - v1*tau_s:
//   tau_lo = max( C1 + sqrt(C1^2 - 2*Delta/u_min), 2*C1 + 2*Delta/(v1 - v_min) )
//   tau_hi = (phi3 + sqrt(phi3^2 + 4*phi4)) / 2,
//   phi3 = (2*C1*v1 + Delta + C2)/v1,  phi4 = (2*Delta*tau_s - 2*C1*C2)/v1.
// With C1 = 0 equals feasible_range_two bit-for-bit. Throws std::domain_error
// when phi3^2 + 4*phi4 < 0 (no real upper bound: infeasible zone).
std::pair<double, double> feasible_range_multi(const FeasibilityInputs& in);

// Builds and validates the full schedule for a desired formation time t_p:
// tau_t = t_p - t_c - tau_s, checked against the feasibility interval, then
// solved for u_p. Throws InfeasibleError naming the binding bound, or
// std::invalid_argument for structurally bad requests (non-positive tau_t,
// already-platooned fleet).
ControlPlan plan(const ScenarioConfig& config, const FleetSnapshot& snapshot, double t_p);

// Control input at time t: u_p during the transition, 0 while holding speed
// inside the zone, nullopt past t_f (caller switches the CAV to the
// car-following law with no predecessor). Throws for t < t_c.
std::optional<double> control_at(const ControlPlan& plan, double t);

}  // namespace platoon
