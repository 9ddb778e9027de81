#include "platoon/hdv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace platoon {

double equilibrium_speed(double delta, double s, double v_max, double scale) {
    // tanh(+inf) == 1, so kNoPredecessor needs no branch.
    return 0.5 * v_max * (std::tanh(scale * delta) + std::tanh(scale * s));
}

DelayHistory::DelayHistory(double dt, double eta_bar) : dt_(dt), eta_bar_(eta_bar) {
    if (!(dt > 0.0)) throw std::invalid_argument("DelayHistory: dt must be > 0");
    if (!(eta_bar >= 0.0)) throw std::invalid_argument("DelayHistory: eta_bar must be >= 0");
    // Max lag index is round(eta_bar/dt); +2 gives slack for the eviction rule.
    const std::size_t cap = static_cast<std::size_t>(std::lround(eta_bar / dt)) + 2;
    ring_.resize(cap);
}

void DelayHistory::record_sample(double t, double delta, double s, double v) {
    if (count_ > 0) {
        const double expected = ring_[head_].t + dt_;
        if (std::abs(t - expected) > 1e-6 * dt_) {
            std::ostringstream os;
            os << "DelayHistory: non-contiguous sample time " << t << " (expected " << expected
               << ")";
            throw std::logic_error(os.str());
        }
    }
    head_ = count_ == 0 ? 0 : (head_ + 1) % ring_.size();
    ring_[head_] = DelaySample{t, delta, s, v};
    if (count_ < ring_.size()) {
        ++count_;
    }
    // Ring reuse == eviction; capacity is sized so only samples older than
    // t - eta_bar - dt are overwritten.
}

const DelaySample& DelayHistory::newest() const {
    if (count_ == 0) throw std::out_of_range("DelayHistory: empty");
    return ring_[head_];
}

const DelaySample& DelayHistory::at_delay(double t, double eta) const {
    if (count_ == 0) throw std::out_of_range("DelayHistory: empty");
    if (std::abs(t - ring_[head_].t) > 1e-6 * dt_)
        throw std::logic_error("DelayHistory: lookup time is not the newest sample time");
    const long lag = std::lround(eta / dt_);
    if (lag < 0 || static_cast<std::size_t>(lag) >= count_) {
        std::ostringstream os;
        os << "DelayHistory: history does not reach back " << eta << " s (have "
           << (count_ ? (count_ - 1) * dt_ : 0.0) << " s)";
        throw std::out_of_range(os.str());
    }
    const std::size_t idx = (head_ + ring_.size() - static_cast<std::size_t>(lag)) % ring_.size();
    return ring_[idx];
}

double ovm_accel(const DelayHistory& history, double t, const VehicleParams& params,
                 double v_max, double scale) {
    const DelaySample& perceived = history.at_delay(t, params.eta);
    return params.alpha *
           (equilibrium_speed(perceived.delta, perceived.s, v_max, scale) - perceived.v);
}

}  // namespace platoon
