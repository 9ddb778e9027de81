#include "platoon/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "platoon/controller.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"

namespace platoon {

namespace {

// 53-bit mantissa draw in [lo, hi); bit-stable across platforms, unlike
// std::uniform_real_distribution.
double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

// Sum of follower time gaps entering the closed-form deceleration: every
// follower except the last one.
double interior_rho_sum(const ScenarioConfig& cfg) {
    double c1 = 0.0;
    for (std::size_t j = 1; j + 1 < cfg.vehicles.size(); ++j) c1 += cfg.vehicles[j].first.rho;
    return c1;
}

struct AxisBounds {
    double min;
    double max;
};

// Hard validity clamps for plant-parameter axes (the run would be rejected
// by config validation outside these).
AxisBounds plant_axis_bounds(const SweepSpec& spec) {
    switch (spec.axis) {
        case SweepAxis::Eta:
            return {0.0, spec.base.eta_bar};
        case SweepAxis::Rho:
            return {1e-3, 1e9};
        case SweepAxis::Alpha:
            return {1e-3, 1e9};
        case SweepAxis::TauT:
            break;
    }
    return {-1e300, 1e300};
}

SweepRecord run_one(const SweepSpec& spec, int n, double axis_value, std::mt19937_64& rng) {
    SweepRecord rec;
    rec.axis_value = axis_value;
    rec.N = n;

    const AxisBounds bounds = plant_axis_bounds(spec);
    // Per-follower plant values for this record (empty on the TauT axis).
    std::vector<double> follower_vals;
    if (spec.axis != SweepAxis::TauT) {
        follower_vals.resize(static_cast<std::size_t>(n) - 1, axis_value);
        if (spec.jitter > 0.0) {
            for (double& v : follower_vals)
                v = uniform_draw(rng, axis_value - spec.jitter, axis_value + spec.jitter);
        }
        for (double& v : follower_vals) v = std::clamp(v, bounds.min, bounds.max);
    }

    try {
        ScenarioConfig cfg =
            spec.axis == SweepAxis::Rho
                ? rebuild_for_size(spec.base, n, &follower_vals)
                : rebuild_for_size(spec.base, n);
        if (spec.axis == SweepAxis::Eta) {
            for (std::size_t i = 1; i < cfg.vehicles.size(); ++i)
                cfg.vehicles[i].first.eta = follower_vals[i - 1];
        } else if (spec.axis == SweepAxis::Alpha) {
            for (std::size_t i = 1; i < cfg.vehicles.size(); ++i)
                cfg.vehicles[i].first.alpha = follower_vals[i - 1];
        }

        const double tau_s = stabilization_duration(cfg.eta_bar, cfg.tau_r);
        const double t_p =
            spec.axis == SweepAxis::TauT ? cfg.t_c + axis_value + tau_s : cfg.t_p;
        cfg.t_p = t_p;

        const FleetSnapshot ss = make_steady_state_fleet(cfg);
        const ControlPlan cp = plan(cfg, ss, t_p);
        rec.u_p = cp.u_p;
        const Trajectory traj = run(cfg, cp, default_horizon(cfg, cp));
        rec.verdict = "feasible";

        const FormationReport rep =
            detect_formation(traj, cfg.tolerances, t_p, cfg.road.control_length);
        if (rep.t_ap) {
            rec.t_ap = rep.t_ap;
            rec.deviation_pct = rep.deviation_pct;
            if (!rep.in_zone) rec.binding_constraint = "formed past control zone end";
        } else {
            rec.binding_constraint = rep.not_reached_reason;
        }
    } catch (const InfeasibleError& e) {
        rec.verdict = "infeasible";
        rec.binding_constraint = e.binding;
    } catch (const CollisionError& e) {
        rec.verdict = "error";
        rec.binding_constraint = e.what();
    } catch (const std::exception& e) {
        rec.verdict = "error";
        rec.binding_constraint = e.what();
    }
    return rec;
}

}  // namespace

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::TauT:
            return "tau";
        case SweepAxis::Eta:
            return "eta";
        case SweepAxis::Rho:
            return "rho";
        case SweepAxis::Alpha:
            return "alpha";
    }
    return "?";
}

ScenarioConfig rebuild_for_size(const ScenarioConfig& base, int n,
                                const std::vector<double>* rho_per_follower) {
    if (n < 2) throw std::invalid_argument("rebuild_for_size: fleet size must be >= 2");
    if (base.fleet_size() < 2)
        throw std::invalid_argument("rebuild_for_size: base scenario needs a follower");
    if (rho_per_follower && rho_per_follower->size() != static_cast<std::size_t>(n) - 1)
        throw std::invalid_argument("rebuild_for_size: rho override size mismatch");

    const FleetSnapshot base_ss = make_steady_state_fleet(base);
    const double D_base = cumulative_gap(base_ss, base);
    const double tau_ref =
        base.t_p - base.t_c - stabilization_duration(base.eta_bar, base.tau_r);
    const double c1_base = interior_rho_sum(base);

    const VehicleParams tpl = base.vehicles[1].first;  // follower template
    const double c1_n = tpl.rho * (n - 2);  // nominal interior sum of the rebuilt fleet

    // Scale the cumulative gap so that the plan at tau_ref yields the same
    // equilibrium speed for every fleet size:
    //   v_eq = v1 - 2 D / (tau_ref - 2 C1)  =>  D ~ (tau_ref - 2 C1).
    const double denom = tau_ref - 2.0 * c1_base;
    if (!(denom > 0.0))
        throw std::invalid_argument("rebuild_for_size: base transition too short for its fleet");
    const double scale_n = tau_ref - 2.0 * c1_n;
    if (!(scale_n > 0.0))
        throw std::invalid_argument("rebuild_for_size: transition too short for requested fleet");
    const double D_n = D_base * scale_n / denom;
    const double gap_per_pair = D_n / (n - 1);

    ScenarioConfig cfg;
    cfg.road = base.road;
    cfg.t_c = base.t_c;
    cfg.t_p = base.t_p;
    cfg.tau_r = base.tau_r;
    cfg.eta_bar = base.eta_bar;
    cfg.dt = base.dt;
    cfg.tanh_scale = base.tanh_scale;
    cfg.horizon_extra = base.horizon_extra;
    cfg.tolerances = base.tolerances;
    cfg.name = base.name;

    cfg.vehicles.reserve(static_cast<std::size_t>(n));
    VehicleState lead = base.vehicles[0].second;
    lead.speed = base.road.v_max;
    lead.accel = 0.0;
    cfg.vehicles.emplace_back(base.vehicles[0].first, lead);

    double prev_pos = lead.position;
    for (int i = 1; i < n; ++i) {
        VehicleParams vp = tpl;
        if (rho_per_follower) vp.rho = (*rho_per_follower)[static_cast<std::size_t>(i) - 1];
        const double spacing = dynamic_spacing(base.road.v_max, vp, base.road.s0);
        VehicleState vs;
        vs.position = prev_pos - (gap_per_pair + spacing + vp.length);
        vs.speed = base.road.v_max;
        vs.accel = 0.0;
        cfg.vehicles.emplace_back(vp, vs);
        prev_pos = vs.position;
    }
    return cfg;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
    if (spec.samples < 1) throw std::invalid_argument("run_sweep: samples must be >= 1");
    if (spec.fleet_sizes.empty())
        throw std::invalid_argument("run_sweep: at least one fleet size required");
    if (spec.axis != SweepAxis::TauT) {
        if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi))
            throw std::invalid_argument("run_sweep: this axis needs a finite sample range");
        if (!(spec.lo <= spec.hi))
            throw std::invalid_argument("run_sweep: lo must not exceed hi");
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<SweepRecord> out;
    out.reserve(spec.fleet_sizes.size() * static_cast<std::size_t>(spec.samples));

    for (int n : spec.fleet_sizes) {
        double lo = spec.lo, hi = spec.hi;
        if (spec.axis == SweepAxis::TauT) {
            // Effective range: requested range clipped to this fleet's
            // feasibility interval (an unbounded request means the whole
            // interval).
            const ScenarioConfig nominal = rebuild_for_size(spec.base, n);
            const FleetSnapshot ss = make_steady_state_fleet(nominal);
            FeasibilityInputs fin;
            fin.delta_or_Delta = cumulative_gap(ss, nominal);
            fin.v1_tc = ss.states.front().speed;
            fin.rho_sum = interior_rho_sum(nominal);
            fin.L_c = nominal.road.control_length - ss.states.front().position;
            fin.u_min = nominal.road.u_min;
            fin.v_min = nominal.road.v_min;
            fin.tau_s = stabilization_duration(nominal.eta_bar, nominal.tau_r);
            const auto [tau_lo, tau_hi] = feasible_range_multi(fin);
            lo = std::isfinite(spec.lo) ? std::max(spec.lo, tau_lo) : tau_lo;
            hi = std::isfinite(spec.hi) ? std::min(spec.hi, tau_hi) : tau_hi;
            if (!(lo <= hi)) {
                SweepRecord rec;
                rec.axis_value = spec.lo;
                rec.N = n;
                rec.verdict = "infeasible";
                rec.binding_constraint = "empty interval";
                out.push_back(rec);
                continue;
            }
        }
        for (int k = 0; k < spec.samples; ++k) {
            const double x =
                spec.samples == 1 ? lo : lo + (hi - lo) * k / (spec.samples - 1);
            out.push_back(run_one(spec, n, x, rng));
        }
    }
    return out;
}

SweepSummary aggregate(SweepAxis axis, const std::vector<SweepRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    SweepSummary s;
    s.axis = axis;
    s.n_records = records.size();
    double sum = 0.0;
    bool first = true;
    for (const SweepRecord& r : records) {
        if (r.verdict == "feasible") ++s.n_feasible;
        if (!r.deviation_pct) continue;
        const double d = *r.deviation_pct;
        ++s.n_reached;
        sum += d;
        if (first || d < s.dev_min) s.dev_min = d;
        if (first || d > s.dev_max) s.dev_max = d;
        if (first || std::fabs(d) > std::fabs(s.worst_deviation)) {
            s.worst_deviation = d;
            s.worst_axis_value = r.axis_value;
            s.worst_N = r.N;
        }
        first = false;
    }
    if (s.n_reached > 0) s.dev_mean = sum / static_cast<double>(s.n_reached);
    s.feasibility_fraction =
        static_cast<double>(s.n_feasible) / static_cast<double>(s.n_records);
    return s;
}

}  // namespace platoon
