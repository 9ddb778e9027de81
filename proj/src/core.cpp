#include "platoon/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace platoon {

double dynamic_spacing(double v, const VehicleParams& params, double s0) {
    return params.rho * v + s0;
}

double platoon_gap(const VehicleState& pred, const VehicleState& self,
                   const VehicleParams& self_params, double s0) {
    if (!(pred.position > self.position)) {
        std::ostringstream os;
        os << "platoon_gap: predecessor not strictly ahead (p_pred=" << pred.position
           << ", p_self=" << self.position << ") — collision or mis-ordered fleet";
        throw std::invalid_argument(os.str());
    }
    return pred.position - self.position - dynamic_spacing(self.speed, self_params, s0) -
           self_params.length;
}

double cumulative_gap(const FleetSnapshot& snapshot, const ScenarioConfig& config) {
    const std::size_t n = snapshot.states.size();
    if (n < 2) throw std::invalid_argument("cumulative_gap: need at least 2 vehicles");
    double spacing_sum = 0.0;  // sum of s_j + l_c over followers j = 2..N
    for (std::size_t j = 1; j < n; ++j) {
        const auto& params = config.vehicles[j].first;
        spacing_sum += dynamic_spacing(snapshot.states[j].speed, params, config.road.s0) +
                       params.length;
    }
    return snapshot.states.front().position - snapshot.states.back().position - spacing_sum;
}

FleetSnapshot make_steady_state_fleet(const ScenarioConfig& config) {
    validate_config(config);
    FleetSnapshot snap;
    snap.time = config.t_c;
    snap.states.reserve(config.vehicles.size());
    for (const auto& [params, init] : config.vehicles) {
        VehicleState st = init;
        st.speed = config.road.v_max;  // steady free flow upstream of the zone
        st.accel = 0.0;
        snap.states.push_back(st);
    }
    // Ordering with positive bumper gaps, re-checked on the realized snapshot.
    for (std::size_t i = 1; i < snap.states.size(); ++i) {
        const double bumper = snap.states[i - 1].position - snap.states[i].position -
                              config.vehicles[i].first.length;
        if (!(bumper > 0.0))
            throw std::invalid_argument("make_steady_state_fleet: overlapping vehicles");
    }
    bool any_open = false;  // at least one HDV must still be decoupled
    for (std::size_t i = 1; i < snap.states.size(); ++i) {
        if (platoon_gap(snap.states[i - 1], snap.states[i], config.vehicles[i].first,
                        config.road.s0) > 0.0)
            any_open = true;
    }
    if (!any_open)
        throw std::invalid_argument(
            "make_steady_state_fleet: already platooned (no HDV with positive platoon gap)");
    return snap;
}

void validate_config(const ScenarioConfig& config) {
    const auto& r = config.road;
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (!(r.buffer_length >= 0.0)) fail("buffer_length must be >= 0");
    if (!(r.control_length > 0.0)) fail("control_length must be > 0");
    if (!(0.0 < r.v_min && r.v_min < r.v_max)) fail("need 0 < v_min < v_max");
    if (!(r.u_min < 0.0)) fail("u_min must be < 0");
    if (!(r.u_max > 0.0)) fail("u_max must be > 0");
    if (!(r.s0 > 0.0)) fail("s0 must be > 0");
    if (!(config.dt > 0.0)) fail("dt must be > 0");
    if (!(config.tau_r > 0.0)) fail("tau_r must be > 0");
    if (!(config.eta_bar >= 0.0)) fail("eta_bar must be >= 0");
    if (!(config.tanh_scale > 0.0)) fail("tanh_scale must be > 0");
    if (!(config.horizon_extra > 0.0)) fail("horizon_extra must be > 0");
    if (!(config.tolerances.eps_v > 0.0)) fail("eps_v must be > 0");
    if (!(config.tolerances.eps_delta > 0.0)) fail("eps_delta must be > 0");
    if (!(config.tolerances.dwell > 0.0)) fail("dwell must be > 0");

    if (config.vehicles.size() < 2) fail("need at least 2 vehicles (one CAV, one HDV)");
    if (config.vehicles.front().first.kind != VehicleKind::CAV)
        fail("vehicle 1 must be the CAV");
    for (std::size_t i = 1; i < config.vehicles.size(); ++i) {
        if (config.vehicles[i].first.kind != VehicleKind::HDV)
            fail("vehicles 2..N must be HDVs");
    }
    for (std::size_t i = 0; i < config.vehicles.size(); ++i) {
        const auto& p = config.vehicles[i].first;
        std::ostringstream os;
        os << "vehicle " << (i + 1) << ": ";
        if (!(p.rho > 0.0)) fail(os.str() + "rho must be > 0");
        if (!(p.alpha > 0.0)) fail(os.str() + "alpha must be > 0");
        if (!(p.eta >= 0.0)) fail(os.str() + "eta must be >= 0");
        if (p.eta > config.eta_bar) fail(os.str() + "eta exceeds eta_bar");
        if (!(p.length > 0.0)) fail(os.str() + "length must be > 0");
    }
    for (std::size_t i = 1; i < config.vehicles.size(); ++i) {
        const double gap = config.vehicles[i - 1].second.position -
                           config.vehicles[i].second.position - config.vehicles[i].first.length;
        if (!(gap > 0.0)) fail("positions must decrease front-to-back with positive bumper gaps");
    }
    // At the entry speed v_max, at least one HDV must still be decoupled;
    // otherwise there is nothing to form.
    bool any_open = false;
    for (std::size_t i = 1; i < config.vehicles.size(); ++i) {
        VehicleState pred = config.vehicles[i - 1].second;
        VehicleState self = config.vehicles[i].second;
        pred.speed = self.speed = config.road.v_max;
        if (platoon_gap(pred, self, config.vehicles[i].first, config.road.s0) > 0.0)
            any_open = true;
    }
    if (!any_open) fail("already platooned: no HDV with positive platoon gap at entry");
    if (!(config.t_p > config.t_c)) fail("t_p must exceed t_c");
}

std::vector<std::string> config_warnings(const ScenarioConfig& config) {
    std::vector<std::string> out;
    const double l0 = config.vehicles.front().first.length;
    for (const auto& [params, init] : config.vehicles) {
        if (params.length != l0) {
            out.push_back("heterogeneous vehicle lengths; gap algebra assumes a common l_c");
            break;
        }
    }
    // Wide admissible speed bands allow deep maneuvers whose transients can
    // defeat local stability of the following chain.
    const double band = config.road.v_max - config.road.v_min;
    if (band > 0.75 * config.road.v_max)
        out.push_back("v_max - v_min exceeds 75% of v_max; deep maneuvers may destabilize the chain");
    return out;
}

}  // namespace platoon
