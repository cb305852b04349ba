#pragma once
#include <cmath>
#include <string>
#include <string_view>

#include "fogopt/errors.hpp"

namespace fogopt {

enum class PowerModel { Practical, Unrealistic };

inline std::string to_string(PowerModel m)
{
    return m == PowerModel::Practical ? "practical" : "unrealistic";
}

inline PowerModel parse_power_model(std::string_view s)
{
    if (s == "practical") return PowerModel::Practical;
    if (s == "unrealistic") return PowerModel::Unrealistic;
    throw ValidationError("power_model must be 'practical' or 'unrealistic', got '" + std::string(s) + "'");
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_per_hz_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Cell-wide constants. Defaults are the single-cell setup of the reference
// experiments: N0 = -174 dBm/Hz, beta = -90 dB, alpha = 3.5, 1.2 GHz fog CPU.
struct NetworkConfig
{
    double bandwidth_hz = 2e5;
    double noise_density_w_per_hz = dbm_per_hz_to_w(-174.0);
    double pathloss_beta = db_to_linear(-90.0);
    double pathloss_alpha = 3.5;
    double cpu_cap_hz = 1.2e9;
    double cpu_energy_lambda = 1e-25;
    PowerModel power_model = PowerModel::Practical;
    int device_count = 3;

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError(std::string(name) + " must be a finite value > 0");
        };
        positive(bandwidth_hz, "bandwidth_hz");
        positive(noise_density_w_per_hz, "noise_density_w_per_hz");
        positive(pathloss_beta, "pathloss_beta");
        positive(pathloss_alpha, "pathloss_alpha");
        positive(cpu_cap_hz, "cpu_cap_hz");
        positive(cpu_energy_lambda, "cpu_energy_lambda");
        if (device_count < 1) throw ValidationError("device_count must be >= 1");
    }

    bool operator==(const NetworkConfig&) const = default;
};

// Large-scale gain beta / d^alpha with d in km.
inline double pathloss_gain(double distance_km, const NetworkConfig& cfg)
{
    if (!(distance_km > 0.0)) throw DomainError("pathloss_gain: distance must be > 0");
    return cfg.pathloss_beta / std::pow(distance_km, cfg.pathloss_alpha);
}

// One IoT device and its task. gain is derived from the distance.
struct Device
{
    double distance_km = 0.0;
    double task_bits = 0.0;
    double cycles_per_bit = 0.0;
    double max_power_w = 0.0;
    double idle_power_w = 0.0;
    double gain = 0.0;

    static Device make(double distance_km, double task_bits, double cycles_per_bit,
                       double max_power_w, double idle_power_w, const NetworkConfig& cfg)
    {
        Device d{distance_km, task_bits, cycles_per_bit, max_power_w, idle_power_w, 0.0};
        d.gain = pathloss_gain(distance_km, cfg);
        d.validate();
        return d;
    }

    // Total CPU cycles of the task, C_k * D_k.
    double cycles() const { return cycles_per_bit * task_bits; }

    void validate() const
    {
        if (!(distance_km > 0.0)) throw ValidationError("device distance_km must be > 0");
        if (!(task_bits > 0.0)) throw ValidationError("device task_bits must be > 0");
        if (!(cycles_per_bit > 0.0)) throw ValidationError("device cycles_per_bit must be > 0");
        if (!(max_power_w > 0.0)) throw ValidationError("device max_power_w must be > 0");
        if (!(idle_power_w >= 0.0)) throw ValidationError("device idle_power_w must be >= 0");
        if (!(gain > 0.0)) throw ValidationError("device gain must be > 0");
    }

    bool operator==(const Device&) const = default;
};

} // namespace fogopt
