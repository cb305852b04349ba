#pragma once
#include <cmath>
#include <numbers>

#include "fogopt/jet.hpp"
#include "fogopt/model.hpp"

namespace fogopt {

struct RatePoint
{
    double power_w = 0.0;
    double rate_bps = 0.0;
};

// Uplink rate B log2(1 + p l / (B N0)) in bit/s. Exactly 0 at p = 0.
// Templated so the solvers can differentiate through it.
template <class S>
inline S data_rate(const S& power_w, double gain, const NetworkConfig& cfg)
{
    using std::log1p;
    const double snr_per_watt = gain / (cfg.bandwidth_hz * cfg.noise_density_w_per_hz);
    return log1p(power_w * snr_per_watt) * (cfg.bandwidth_hz / std::numbers::ln2);
}

inline RatePoint rate_point(double power_w, double gain, const NetworkConfig& cfg)
{
    if (!(power_w >= 0.0)) throw DomainError("data_rate: power must be >= 0");
    return {power_w, data_rate(power_w, gain, cfg)};
}

} // namespace fogopt
