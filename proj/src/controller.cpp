#include "platoon/controller.hpp"

#include <cmath>
#include <sstream>

namespace platoon {

double stabilization_duration(double eta_bar, double tau_r) {
    if (!(eta_bar >= 0.0)) throw std::invalid_argument("stabilization_duration: eta_bar < 0");
    if (!(tau_r > 0.0)) throw std::invalid_argument("stabilization_duration: tau_r <= 0");
    return eta_bar + tau_r;
}

double solve_up_multi(double Delta_tc, double tau_t, double rho_sum) {
    if (!(Delta_tc > 0.0))
        throw std::invalid_argument("solve_up: already platooned (cumulative gap <= 0)");
    if (!(rho_sum >= 0.0)) throw std::invalid_argument("solve_up: rho_sum < 0");
    if (!(tau_t > 2.0 * rho_sum))
        throw std::invalid_argument("solve_up: transition too short (tau_t <= 2*C1)");
    return -2.0 * Delta_tc / (tau_t * tau_t - 2.0 * tau_t * rho_sum);
}

double solve_up_two(double delta2_tc, double tau_t) {
    // Single-follower case == empty interior-follower sum; same expression,
    // bit-for-bit (x - 2*tau*0 is exactly x).
    return solve_up_multi(delta2_tc, tau_t, 0.0);
}

std::pair<double, double> feasible_range_multi(const FeasibilityInputs& in) {
    if (!(in.delta_or_Delta > 0.0))
        throw std::invalid_argument("feasible_range: gap must be > 0");
    if (!(in.v1_tc > in.v_min))
        throw std::invalid_argument("feasible_range: v1(t_c) must exceed v_min");
    if (!(in.u_min < 0.0)) throw std::invalid_argument("feasible_range: u_min must be < 0");
    if (!(in.rho_sum >= 0.0)) throw std::invalid_argument("feasible_range: rho_sum < 0");

    const double C1 = in.rho_sum;
    const double D = in.delta_or_Delta;
    // Deepest admissible braking: u_p = u_min at this duration.
    const double lo_umin = C1 + std::sqrt(C1 * C1 - 2.0 * D / in.u_min);
    // Slowest admissible final speed: v_1(t_s) = v_min at this duration.
    const double lo_vmin = 2.0 * C1 + 2.0 * D / (in.v1_tc - in.v_min);
    const double tau_lo = std::max(lo_umin, lo_vmin);

    const double C2 = in.L_c - in.v1_tc * in.tau_s;
    const double phi3 = (2.0 * C1 * in.v1_tc + D + C2) / in.v1_tc;
    const double phi4 = (2.0 * D * in.tau_s - 2.0 * C1 * C2) / in.v1_tc;
    const double disc = phi3 * phi3 + 4.0 * phi4;
    if (disc < 0.0)
        throw std::domain_error(
            "feasible_range: no real in-zone upper bound (infeasible zone geometry)");
    const double tau_hi = 0.5 * (phi3 + std::sqrt(disc));
    return {tau_lo, tau_hi};  // tau_lo > tau_hi encodes an empty interval
}

std::pair<double, double> feasible_range_two(const FeasibilityInputs& in) {
    if (in.rho_sum != 0.0)
        throw std::invalid_argument("feasible_range_two: rho_sum must be 0 (single follower)");
    return feasible_range_multi(in);
}

ControlPlan plan(const ScenarioConfig& config, const FleetSnapshot& snapshot, double t_p) {
    const std::size_t n = snapshot.states.size();
    if (n < 2) throw std::invalid_argument("plan: need at least 2 vehicles");
    const double tau_s = stabilization_duration(config.eta_bar, config.tau_r);
    const double tau_t = t_p - config.t_c - tau_s;
    if (!(tau_t > 0.0)) {
        std::ostringstream os;
        os << "plan: non-positive transition duration (t_p=" << t_p << ", t_c=" << config.t_c
           << ", tau_s=" << tau_s << ")";
        throw std::invalid_argument(os.str());
    }

    const double D = cumulative_gap(snapshot, config);
    if (!(D > 0.0)) {
        bool all_coupled = true;
        for (std::size_t i = 1; i < n; ++i) {
            if (platoon_gap(snapshot.states[i - 1], snapshot.states[i],
                            config.vehicles[i].first, config.road.s0) > 0.0)
                all_coupled = false;
        }
        if (all_coupled) throw std::invalid_argument("plan: already platooned");
        throw std::invalid_argument("plan: cumulative platoon gap not positive at t_c");
    }

    double C1 = 0.0;  // interior followers only: j = 2..N-1
    for (std::size_t j = 1; j + 1 < n; ++j) C1 += config.vehicles[j].first.rho;

    FeasibilityInputs fin;
    fin.delta_or_Delta = D;
    fin.v1_tc = snapshot.states.front().speed;
    fin.rho_sum = C1;
    // Remaining control-zone distance as seen from the lead's current position.
    fin.L_c = config.road.control_length - snapshot.states.front().position;
    fin.u_min = config.road.u_min;
    fin.v_min = config.road.v_min;
    fin.tau_s = tau_s;
    const auto [tau_lo, tau_hi] = feasible_range_multi(fin);

    if (tau_lo > tau_hi) {
        std::ostringstream os;
        os << "plan: empty feasibility interval (tau_lo=" << tau_lo << " > tau_hi=" << tau_hi
           << ")";
        throw InfeasibleError(os.str(), "empty interval");
    }
    if (tau_t < tau_lo) {
        const double lo_umin = C1 + std::sqrt(C1 * C1 - 2.0 * D / fin.u_min);
        const std::string which = tau_lo == lo_umin ? "u_min bound" : "v_min bound";
        std::ostringstream os;
        os << "plan: infeasible tau_t=" << tau_t << " below tau_lo=" << tau_lo << " (" << which
           << ")";
        throw InfeasibleError(os.str(), which);
    }
    if (tau_t > tau_hi) {
        std::ostringstream os;
        os << "plan: infeasible tau_t=" << tau_t << " above tau_hi=" << tau_hi
           << " (control zone bound)";
        throw InfeasibleError(os.str(), "control zone bound");
    }

    ControlPlan cp;
    cp.u_p = n == 2 ? solve_up_two(D, tau_t) : solve_up_multi(D, tau_t, C1);
    cp.t_c = config.t_c;
    cp.tau_t = tau_t;
    cp.tau_s = tau_s;
    cp.t_s = config.t_c + tau_t;
    cp.feasible_interval = {tau_lo, tau_hi};
    cp.gap_solved = D;
    cp.rho_sum = C1;
    const double v1 = snapshot.states.front().speed;
    cp.v_eq_planned = v1 + cp.u_p * tau_t;
    // Planned zone exit: brake phase displacement, then cruise at v_eq.
    const double p1_ts =
        snapshot.states.front().position + v1 * tau_t + 0.5 * cp.u_p * tau_t * tau_t;
    if (p1_ts > config.road.control_length)
        throw InfeasibleError("plan: CAV would exit the control zone before t_s",
                              "control zone bound");
    cp.t_f = cp.t_s + (config.road.control_length - p1_ts) / cp.v_eq_planned;
    // Bound sanity on the product of the validated interval.
    if (!(cp.u_p < 0.0) || cp.u_p < fin.u_min - 1e-9)
        throw std::logic_error("plan: solved u_p escaped [u_min, 0)");
    return cp;
}

std::optional<double> control_at(const ControlPlan& plan, double t) {
    // Boundary slack absorbs float rounding of grid times against the
    // continuous schedule; far below any usable dt.
    constexpr double kEdge = 1e-9;  // s
    if (t < plan.t_c - kEdge) throw std::invalid_argument("control_at: t precedes t_c");
    if (t <= plan.t_s + kEdge) return plan.u_p;
    if (t <= plan.t_f + kEdge) return 0.0;
    return std::nullopt;  // past the zone: caller switches to car-following
}

}  // namespace platoon
