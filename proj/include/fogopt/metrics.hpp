#pragma once
#include <optional>
#include <vector>

#include "fogopt/power.hpp"
#include "fogopt/radio.hpp"
#include "fogopt/surrogate.hpp"

namespace fogopt {

// Decision variables for all devices.
struct Allocation
{
    std::vector<double> freqs_hz;
    std::vector<double> powers_w;

    std::size_t size() const { return freqs_hz.size(); }

    // Throws ValidationError unless 0 < p_k <= pmax_k, f_k > 0 and
    // sum f_k <= cpu cap (relative slack rel_tol).
    void validate(const std::vector<Device>& devices, const NetworkConfig& cfg, double rel_tol = 1e-9) const
    {
        if (freqs_hz.size() != devices.size() || powers_w.size() != devices.size())
            throw ValidationError("allocation size does not match device count");
        double total = 0.0;
        for (std::size_t k = 0; k < devices.size(); ++k) {
            if (!(freqs_hz[k] > 0.0)) throw ValidationError("allocation: f_k must be > 0");
            if (!(powers_w[k] > 0.0) || powers_w[k] > devices[k].max_power_w)
                throw ValidationError("allocation: p_k must lie in (0, pmax_k]");
            total += freqs_hz[k];
        }
        if (total > cfg.cpu_cap_hz * (1.0 + rel_tol))
            throw ValidationError("allocation: sum of f_k exceeds the fog CPU cap");
    }
};

struct LatencyEnergy
{
    double t_tx_s = 0.0;
    double t_ex_s = 0.0;
    double t_total_s = 0.0;
    double e_tx_j = 0.0;
    double e_ex_j = 0.0;
    double e_on_j = 0.0;
    double e_total_j = 0.0;
};

struct Latency
{
    double t_tx_s, t_ex_s, t_total_s;
};

struct Energy
{
    double e_tx_j, e_ex_j, e_on_j, e_total_j;
};

// Regrouping of the transmit energy:
//   E_tx(p) = D (k1 + k2 p) / R(p) + c_bb D
// so p / R(p) is the only non-convex piece.
struct EnergyRatioDecomposition
{
    double k1_w = 0.0;
    double k2 = 1.0;
    double c_bb_j_per_bit = 0.0;
};

inline EnergyRatioDecomposition energy_ratio_decomposition(const NetworkConfig& cfg)
{
    const CircuitPowerModel m = circuit_model(cfg);
    return {m.p_connected_w + m.bb_const_mw / 1000.0 + m.rf_const_w,
            1.0 + m.rf_slope,
            m.bb_slope_mw_per_mbps / 1e9};
}

inline EnergyRatioDecomposition energy_ratio_decomposition(const Device&, const NetworkConfig& cfg)
{
    return energy_ratio_decomposition(cfg);
}

// Templated evaluation kernels shared by the closed-form metrics and the
// differentiable constraint builders.
template <class S>
inline S latency_expr(const Device& d, const S& f_hz, const S& p_w, const NetworkConfig& cfg)
{
    return d.task_bits / data_rate(p_w, d.gain, cfg) + d.cycles() / f_hz;
}

// Total energy. Without t this is the exact model; with t the p / R ratio
// is replaced by its quadratic-transform majorizer.
template <class S>
inline S energy_expr(const Device& d, const S& f_hz, const S& p_w, const NetworkConfig& cfg,
                     std::optional<double> t = std::nullopt)
{
    const EnergyRatioDecomposition c = energy_ratio_decomposition(cfg);
    const double idle = effective_idle_power_w(d, cfg);
    const S rate = data_rate(p_w, d.gain, cfg);
    const S inv_rate = 1.0 / rate;
    const S ratio = t ? surrogate_ratio_expr(p_w, rate, *t) : p_w * inv_rate;
    const S e_tx = d.task_bits * (c.k1_w * inv_rate + c.k2 * ratio) + c.c_bb_j_per_bit * d.task_bits;
    const S e_ex = cfg.cpu_energy_lambda * d.cycles() * square(f_hz);
    const S e_on = idle * (d.task_bits * inv_rate + d.cycles() / f_hz);
    return e_tx + e_ex + e_on;
}

inline Latency latency(const Device& d, double f_hz, double p_w, const NetworkConfig& cfg)
{
    if (!(f_hz > 0.0)) throw DomainError("latency: f must be > 0");
    const double rate = data_rate(p_w, d.gain, cfg);
    if (!(rate > 0.0)) throw DegenerateRateError("latency: transmit power gives zero data rate");
    const double t_tx = d.task_bits / rate;
    const double t_ex = d.cycles() / f_hz;
    return {t_tx, t_ex, t_tx + t_ex};
}

// Exact energy terms evaluated straight from the circuit-power model. With
// t_fractional set, e_tx uses the convex surrogate instead.
inline Energy energy(const Device& d, double f_hz, double p_w, const NetworkConfig& cfg,
                     std::optional<double> t_fractional = std::nullopt)
{
    const Latency lat = latency(d, f_hz, p_w, cfg);
    const CircuitPowerModel m = circuit_model(cfg);
    const double rate = data_rate(p_w, d.gain, cfg);
    double e_tx;
    if (t_fractional) {
        const EnergyRatioDecomposition c = energy_ratio_decomposition(cfg);
        e_tx = d.task_bits * (c.k1_w / rate + c.k2 * surrogate_ratio(p_w, rate, *t_fractional))
             + c.c_bb_j_per_bit * d.task_bits;
    } else {
        e_tx = (m.p_connected_w + baseband_power_w(rate, m) + rf_power_w(p_w, m) + p_w) * lat.t_tx_s;
    }
    const double e_ex = cpu_cycle_energy_j(f_hz, cfg.cpu_energy_lambda) * d.cycles();
    const double e_on = effective_idle_power_w(d, cfg) * lat.t_total_s;
    return {e_tx, e_ex, e_on, e_tx + e_ex + e_on};
}

inline LatencyEnergy evaluate(const Device& d, double f_hz, double p_w, const NetworkConfig& cfg)
{
    const Latency t = latency(d, f_hz, p_w, cfg);
    const Energy e = energy(d, f_hz, p_w, cfg);
    return {t.t_tx_s, t.t_ex_s, t.t_total_s, e.e_tx_j, e.e_ex_j, e.e_on_j, e.e_total_j};
}

} // namespace fogopt
