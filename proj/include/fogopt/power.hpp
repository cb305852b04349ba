#pragma once
#include "fogopt/model.hpp"

namespace fogopt {

// Circuit power of the transmit chain. The baseband row is evaluated in
// mW with the rate in Mbit/s; everything crossing this header is SI.
struct CircuitPowerModel
{
    double p_connected_w = 0.0;
    double bb_const_mw = 0.0;
    double bb_slope_mw_per_mbps = 0.0;
    double rf_const_w = 0.0;
    double rf_slope = 0.0;

    static constexpr CircuitPowerModel practical() { return {1.35, 2110.0, 0.87, 0.6, 10.1}; }
    static constexpr CircuitPowerModel unrealistic() { return {}; }

    bool operator==(const CircuitPowerModel&) const = default;
};

inline CircuitPowerModel circuit_model(PowerModel m)
{
    return m == PowerModel::Practical ? CircuitPowerModel::practical() : CircuitPowerModel::unrealistic();
}

inline CircuitPowerModel circuit_model(const NetworkConfig& cfg) { return circuit_model(cfg.power_model); }

inline double baseband_power_w(double rate_bps, const CircuitPowerModel& m)
{
    const double rate_mbps = rate_bps / 1e6;
    return (m.bb_const_mw + m.bb_slope_mw_per_mbps * rate_mbps) / 1000.0;
}

inline double rf_power_w(double power_w, const CircuitPowerModel& m)
{
    return m.rf_const_w + m.rf_slope * power_w;
}

// Energy per CPU cycle, lambda f^2.
inline double cpu_cycle_energy_j(double freq_hz, double lambda)
{
    return lambda * freq_hz * freq_hz;
}

// Idle power actually charged to a device: the unrealistic model zeroes it.
inline double effective_idle_power_w(const Device& d, const NetworkConfig& cfg)
{
    return cfg.power_model == PowerModel::Practical ? d.idle_power_w : 0.0;
}

} // namespace fogopt
