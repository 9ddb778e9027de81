#pragma once

// Delayed optimal-velocity car-following law and its delay-history plumbing.
// An HDV accelerates toward the equilibrium speed implied by its platoon gap
// and dynamic spacing as perceived eta seconds ago:
//
//     u_i(t) = alpha * ( V(delta_i(t-eta), s_i(t-eta)) - v_i(t-eta) )
//     V(delta, s) = (v_max/2) * (tanh(k*delta) + tanh(k*s))
//
// All three arguments carry the same delay. A vehicle with no predecessor
// treats delta as +infinity, which saturates the leading tanh term to 1 and
// makes V converge to v_max in free flow.

#include <cstddef>
#include <limits>
#include <vector>

#include "platoon/core.hpp"

namespace platoon {

// delta value encoding "no predecessor": tanh(+inf) == 1 exactly in IEEE.
inline constexpr double kNoPredecessor = std::numeric_limits<double>::infinity();

// Equilibrium speed-spacing function V(delta, s). `scale` multiplies both
// tanh arguments (1/m); the default model uses 1.0.
double equilibrium_speed(double delta, double s, double v_max, double scale = 1.0);

// One perceived sample: the quantities a driver reacts to.
struct DelaySample {
    double t = 0.0;      // s
    double delta = 0.0;  // m (kNoPredecessor allowed)
    double s = 0.0;      // m
    double v = 0.0;      // m/s
};

// Fixed-step ring buffer of perceived samples, one per vehicle. Covers at
// least eta_bar seconds; lookups resolve t - eta by index (eta rounded to the
// nearest multiple of dt, a distortion of at most dt/2 of delay).
class DelayHistory {
  public:
    DelayHistory() = default;
    DelayHistory(double dt, double eta_bar);

    // Appends a sample; `t` must equal the last sample time + dt exactly
    // (within one part in 1e6 of dt). Throws std::logic_error on gapped or
    // non-monotone time. The oldest sample is evicted once it is older than
    // t - eta_bar - dt.
    void record_sample(double t, double delta, double s, double v);

    // Sample perceived at time t - eta, where t must be the newest recorded
    // time. Throws std::out_of_range if the buffer does not reach back far
    // enough (mis-sized buffer or eta > eta_bar).
    const DelaySample& at_delay(double t, double eta) const;

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    double dt() const { return dt_; }
    const DelaySample& newest() const;

  private:
    std::vector<DelaySample> ring_;
    std::size_t head_ = 0;   // index of newest sample
    std::size_t count_ = 0;  // valid samples
    double dt_ = 0.01;       // s
    double eta_bar_ = 1.0;   // s
};

// Raw (unclamped) car-following acceleration at time t from the perceived
// state eta seconds earlier. Clamping to [u_min, u_max] is the simulation
// engine's job. Throws if the history does not reach back params.eta.
double ovm_accel(const DelayHistory& history, double t, const VehicleParams& params,
                 double v_max, double scale = 1.0);

}  // namespace platoon
