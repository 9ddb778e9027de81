#pragma once

// Core domain types and the spacing/gap algebra shared by every module:
// vehicle records, road geometry, scenario description, and the dynamic
// spacing / platoon gap / cumulative gap computations.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace platoon {

enum class VehicleKind { CAV, HDV };

// Longitudinal state of one vehicle at one instant.
struct VehicleState {
    double position = 0.0;  // m, front bumper, measured from the control-zone entry line
    double speed = 0.0;     // m/s
    double accel = 0.0;     // m/s^2
};

// Per-vehicle car-following parameters.
struct VehicleParams {
    VehicleKind kind = VehicleKind::HDV;
    double rho = 1.0;     // s, desired time gap
    double alpha = 1.5;   // 1/s, driver sensitivity gain
    double eta = 0.0;     // s, perception delay
    double length = 5.0;  // m, vehicle length l_c
};

// Road geometry and state/control bounds.
struct RoadConfig {
    double buffer_length = 0.0;      // m, L_b (upstream estimation zone; not simulated)
    double control_length = 1500.0;  // m, L_c
    double v_min = 8.0;              // m/s
    double v_max = 20.0;             // m/s
    double u_min = -6.0;             // m/s^2, must be < 0
    double u_max = 3.0;              // m/s^2, must be > 0
    double s0 = 2.0;                 // m, standstill distance
};

// Quantized convergence tolerances for the formation detector.
// An exact steady state is unattainable in discrete simulation, so
// "speed fluctuation is zero" is tested as |v_i - v_1| <= eps_v and the
// coupled-gap condition as delta_i <= eps_delta, both sustained for `dwell`.
struct FormationTolerances {
    double eps_v = 0.1;      // m/s
    double eps_delta = 0.1;  // m (one-sided: delta <= eps_delta)
    double dwell = 2.0;      // s
};

// Complete scenario description. vehicles[0] is the lead CAV; all others
// are HDVs ordered front to back (strictly decreasing positions).
struct ScenarioConfig {
    RoadConfig road;
    std::vector<std::pair<VehicleParams, VehicleState>> vehicles;
    double t_c = 0.0;             // s, control-zone entry time
    double t_p = 47.2;            // s, desired formation time (planning target)
    double tau_r = 4.0;           // s, platoon response time (given a priori)
    double eta_bar = 1.0;         // s, known upper bound on all perception delays
    double dt = 0.01;             // s, integration step
    double tanh_scale = 1.0;      // 1/m, scale applied to both tanh arguments
    double horizon_extra = 15.0;  // s simulated past the planned formation time
    FormationTolerances tolerances;
    std::string name = "inline";  // scenario identity (config file stem)

    std::size_t fleet_size() const { return vehicles.size(); }
};

// States of the whole fleet at one instant, index-aligned with
// ScenarioConfig::vehicles.
struct FleetSnapshot {
    double time = 0.0;  // s
    std::vector<VehicleState> states;
};

// Speed-dependent desired following distance: rho * v + s0.  [m]
double dynamic_spacing(double v, const VehicleParams& params, double s0);

// Platoon gap of `self` behind `pred`: bumper-to-bumper spacing minus the
// dynamic spacing minus the vehicle length. Positive = decoupled free flow,
// <= 0 = coupled following. Throws std::invalid_argument if the pair is
// mis-ordered (pred not strictly ahead).
double platoon_gap(const VehicleState& pred, const VehicleState& self,
                   const VehicleParams& self_params, double s0);

// Cumulative platoon gap: p_1 - p_N - sum_{j=2..N} (s_j + l_c).
// Throws std::invalid_argument if N < 2.
double cumulative_gap(const FleetSnapshot& snapshot, const ScenarioConfig& config);

// Constructs the control-zone entry state: all speeds at v_max (steady
// free flow upstream), zero accelerations, positions from the config.
// Throws if the result violates fleet ordering or has no HDV with a
// positive platoon gap ("already platooned").
FleetSnapshot make_steady_state_fleet(const ScenarioConfig& config);

// Validates every structural invariant of the config (bounds ordering,
// fleet composition, positive gaps, delay bound, ...). Throws
// std::invalid_argument naming the violated rule.
void validate_config(const ScenarioConfig& config);

// Non-fatal advisories: heterogeneous vehicle lengths, wide speed band
// relative to the local-stability guidance, etc.
std::vector<std::string> config_warnings(const ScenarioConfig& config);

}  // namespace platoon
