#include "platoon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platoon {

namespace {

std::size_t index_at(const Trajectory& traj, double t) {
    const long k = std::lround((t - traj.t.front()) / traj.dt);
    if (k < 0 || static_cast<std::size_t>(k) >= traj.steps())
        throw std::invalid_argument("time outside trajectory");
    return static_cast<std::size_t>(k);
}

}  // namespace

std::vector<bool> steady_state_check(const Trajectory& traj, double t,
                                     const FormationTolerances& tol) {
    const std::size_t n = traj.fleet();
    if (n < 2) throw std::invalid_argument("steady_state_check: need at least 2 vehicles");
    if (t - tol.dwell < traj.t.front() - 1e-9)
        throw std::invalid_argument("steady_state_check: t - dwell precedes trajectory start");
    const std::size_t k1 = index_at(traj, t);
    const std::size_t k0 = index_at(traj, t - tol.dwell);

    std::vector<bool> steady(n - 1, true);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(traj.delta[i][k1] - traj.delta[i][k0]) > tol.eps_delta) {
            steady[i - 1] = false;
            continue;
        }
        for (std::size_t k = k0; k <= k1; ++k) {
            if (std::abs(traj.v[i][k] - traj.v[i - 1][k]) > tol.eps_v) {
                steady[i - 1] = false;
                break;
            }
        }
    }
    return steady;
}

std::optional<double> detect_transition(const Trajectory& traj) {
    const std::size_t n = traj.fleet();
    const std::size_t steps = traj.steps();
    auto all_coupled = [&](std::size_t k) {
        for (std::size_t i = 1; i < n; ++i)
            if (traj.delta[i][k] > 0.0) return false;
        return true;
    };
    for (std::size_t k = 0; k < steps; ++k) {
        if (!all_coupled(k)) continue;
        if (k == 0) return traj.t.front();  // already coupled at the start
        // Interpolate each pair's final zero-down-crossing inside the
        // bracketing step; the transition completes at the latest of them.
        double t_cross = traj.t[k - 1];
        for (std::size_t i = 1; i < n; ++i) {
            const double prev = traj.delta[i][k - 1];
            const double cur = traj.delta[i][k];
            if (prev > 0.0) {
                const double frac = prev / (prev - cur);  // cur <= 0 < prev
                t_cross = std::max(t_cross, traj.t[k - 1] + frac * traj.dt);
            }
        }
        return t_cross;
    }
    return std::nullopt;
}

FormationReport detect_formation(const Trajectory& traj, const FormationTolerances& tol,
                                 double t_p, double L_c) {
    const std::size_t n = traj.fleet();
    const std::size_t steps = traj.steps();
    if (n < 2 || steps == 0) throw std::invalid_argument("detect_formation: empty trajectory");

    FormationReport report;
    report.t_s_actual = detect_transition(traj);

    const std::size_t window = static_cast<std::size_t>(std::lround(tol.dwell / traj.dt));
    std::size_t gap_fail = 0, speed_fail = 0;  // diagnostics for NotReached

    std::vector<char> ok(steps, 1);
    for (std::size_t k = 0; k < steps; ++k) {
        bool gap_ok = true, speed_ok = true;
        for (std::size_t i = 1; i < n; ++i) {
            if (traj.delta[i][k] > tol.eps_delta) gap_ok = false;
            if (std::abs(traj.v[i][k] - traj.v[0][k]) > tol.eps_v) speed_ok = false;
        }
        if (!gap_ok) ++gap_fail;
        if (!speed_ok) ++speed_fail;
        ok[k] = gap_ok && speed_ok;
    }

    // Earliest start of a window of `window`+1 consecutive holding samples
    // (both endpoints of [t, t+dwell] inclusive).
    std::size_t runlen = 0;
    std::optional<std::size_t> k_ap;
    for (std::size_t k = 0; k < steps; ++k) {
        runlen = ok[k] ? runlen + 1 : 0;
        if (runlen >= window + 1) {
            k_ap = k - window;
            break;
        }
    }

    if (!k_ap.has_value()) {
        report.not_reached_reason =
            gap_fail >= speed_fail ? "gap condition failed longest" : "speed condition failed longest";
        return report;
    }

    const double t_ap = traj.t[*k_ap];
    report.t_ap = t_ap;
    report.deviation_pct = formation_deviation(t_ap, t_p);
    double v_sum = 0.0;
    for (std::size_t k = *k_ap; k <= *k_ap + window; ++k) v_sum += traj.v[0][k];
    report.v_eq_observed = v_sum / static_cast<double>(window + 1);
    report.in_zone = traj.p[0][*k_ap] <= L_c;
    return report;
}

double formation_deviation(double t_ap, double t_p) {
    if (!(t_p > 0.0)) throw std::invalid_argument("formation_deviation: t_p must be > 0");
    return (t_ap - t_p) / t_p * 100.0;
}

double max_headway_std(const Trajectory& traj, double window) {
    const std::size_t steps = traj.steps();
    const std::size_t span = std::min<std::size_t>(
        steps, static_cast<std::size_t>(std::lround(window / traj.dt)) + 1);
    const std::size_t k0 = steps - span;
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.fleet(); ++i) {
        double mean = 0.0;
        for (std::size_t k = k0; k < steps; ++k) mean += traj.headway[i][k];
        mean /= static_cast<double>(span);
        double var = 0.0;
        for (std::size_t k = k0; k < steps; ++k) {
            const double d = traj.headway[i][k] - mean;
            var += d * d;
        }
        var /= static_cast<double>(span);
        worst = std::max(worst, std::sqrt(var));
    }
    return worst;
}

}  // namespace platoon
