#pragma once

// Robustness experiment harness: grids over the transition duration, the
// perception delay, the time gap, and the sensitivity gain, for several
// fleet sizes, producing deviation records. The controller always plans
// against nominal/bound values (tau_s from eta_bar; true rho in C1 as known
// to the coordinator) while the plant realizes the perturbed parameters.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "platoon/core.hpp"

namespace platoon {

enum class SweepAxis { TauT, Eta, Rho, Alpha };

const char* axis_name(SweepAxis axis);

struct SweepSpec {
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::TauT;
    // Sample range. For TauT the effective per-N range is the intersection
    // with that fleet's feasibility interval; an infinite endpoint (the
    // default) means "up to the interval's own bound". The plant axes
    // (Eta/Rho/Alpha) require a finite range.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    int samples = 50;
    std::vector<int> fleet_sizes = {2, 3, 4};
    std::uint64_t seed = 0;
    // Per-HDV draw half-width around the axis value (0 = all HDVs share it).
    double jitter = 0.0;
};

struct SweepRecord {
    double axis_value = 0.0;
    int N = 0;
    std::optional<double> u_p;             // m/s^2, when a plan was solved
    std::string verdict;                   // "feasible" | "infeasible" | "error"
    std::optional<double> t_ap;            // s; empty = NotReached (or no run)
    std::optional<double> deviation_pct;   // present iff formation reached
    std::string binding_constraint;        // bound name / failure diagnostic
};

struct SweepSummary {
    SweepAxis axis = SweepAxis::TauT;
    std::size_t n_records = 0;
    std::size_t n_feasible = 0;  // a plan was solved and the run completed
    std::size_t n_reached = 0;   // formation detected
    double feasibility_fraction = 0.0;  // n_feasible / n_records
    double dev_min = 0.0, dev_max = 0.0, dev_mean = 0.0;  // over reached records
    double worst_axis_value = 0.0;  // record with the largest |deviation|
    int worst_N = 0;
    double worst_deviation = 0.0;
};

// Rebuilds the base scenario for a fleet of `n`: the lead vehicle is kept,
// followers replicate the base's first HDV, and per-pair platoon gaps are
// sized so the plan at the base transition duration lands on the same
// equilibrium speed for every fleet size. `rho_override`, when set, replaces
// every follower's time gap before spacings/positions are derived (initial
// platoon gaps are preserved, so the cumulative gap is rho-invariant).
ScenarioConfig rebuild_for_size(const ScenarioConfig& base, int n,
                                const std::vector<double>* rho_per_follower = nullptr);

// Runs the grid: for each fleet size, for each axis sample: rebuild,
// re-plan, simulate, detect, record. Per-record failures are captured in the
// record; the sweep itself never aborts. Deterministic for a fixed spec.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

// Distills records into the per-axis summary. Throws on empty input.
SweepSummary aggregate(SweepAxis axis, const std::vector<SweepRecord>& records);

}  // namespace platoon
