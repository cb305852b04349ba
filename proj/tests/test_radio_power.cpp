#include <gtest/gtest.h>

#include <cmath>

#include "fogopt/power.hpp"
#include "fogopt/radio.hpp"

using namespace fogopt;

namespace {

NetworkConfig narrowband()
{
    NetworkConfig cfg;
    cfg.bandwidth_hz = 1e5;
    return cfg;
}

} // namespace

TEST(PathlossGain, ReferenceDistanceGivesBeta)
{
    const NetworkConfig cfg;
    EXPECT_DOUBLE_EQ(pathloss_gain(1.0, cfg), cfg.pathloss_beta);
}

TEST(PathlossGain, HighPrecisionReference)
{
    // 1e-9 / 0.05^3.5 evaluated with 40-digit arithmetic.
    EXPECT_NEAR(pathloss_gain(0.05, NetworkConfig{}), 3.577708763999663e-5, 1e-18);
}

TEST(PathlossGain, DecreasingAndDomainChecked)
{
    const NetworkConfig cfg;
    EXPECT_GT(pathloss_gain(0.05, cfg), pathloss_gain(0.07, cfg));
    EXPECT_THROW(pathloss_gain(0.0, cfg), DomainError);
    EXPECT_THROW(pathloss_gain(-0.1, cfg), DomainError);
}

TEST(DataRate, ZeroPowerGivesZeroRate)
{
    EXPECT_EQ(data_rate(0.0, 3.58e-5, narrowband()), 0.0);
    const RatePoint rp = rate_point(0.0, 3.58e-5, narrowband());
    EXPECT_EQ(rp.rate_bps, 0.0);
    EXPECT_THROW(rate_point(-1.0, 3.58e-5, narrowband()), DomainError);
}

TEST(DataRate, HighPrecisionReference)
{
    NetworkConfig cfg = narrowband();
    cfg.noise_density_w_per_hz = dbm_per_hz_to_w(-174.0);
    // B log2(1 + p l / (B N0)) with 40-digit arithmetic.
    EXPECT_NEAR(data_rate(1.0, 3.58e-5, cfg), 3638801.177433414, 1e-6);
}

TEST(DataRate, DoublingBandwidthLessThanDoublesRate)
{
    NetworkConfig a = narrowband(), b = narrowband();
    b.bandwidth_hz *= 2.0;
    const double ra = data_rate(1.0, 3.58e-5, a), rb = data_rate(1.0, 3.58e-5, b);
    EXPECT_GT(rb, ra);
    EXPECT_LT(rb, 2.0 * ra);
}

TEST(DataRate, IncreasingConcaveWithConvexReciprocal)
{
    const NetworkConfig cfg = narrowband();
    const double l = pathloss_gain(0.05, cfg);
    const int n = 400;
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = 2.0 * std::pow(1e-9, 1.0 - static_cast<double>(i) / (n - 1));
    for (int i = 1; i + 1 < n; ++i) {
        const double r0 = data_rate(p[i - 1], l, cfg), r1 = data_rate(p[i], l, cfg), r2 = data_rate(p[i + 1], l, cfg);
        EXPECT_GT(r1, r0);
        // Second divided differences on the nonuniform grid.
        const double h0 = p[i] - p[i - 1], h1 = p[i + 1] - p[i];
        const double d2 = ((r2 - r1) / h1 - (r1 - r0) / h0) / (0.5 * (h0 + h1));
        const double d2_inv = ((1 / r2 - 1 / r1) / h1 - (1 / r1 - 1 / r0) / h0) / (0.5 * (h0 + h1));
        EXPECT_LE(d2 * p[i] * p[i], 1e-9 * r1);
        EXPECT_GE(d2_inv * p[i] * p[i], -1e-9 / r1);
    }
}

TEST(CircuitPower, PracticalPresetCoefficients)
{
    const auto m = CircuitPowerModel::practical();
    EXPECT_EQ(m.p_connected_w, 1.35);
    EXPECT_EQ(m.bb_const_mw, 2110.0);
    EXPECT_EQ(m.bb_slope_mw_per_mbps, 0.87);
    EXPECT_EQ(m.rf_const_w, 0.6);
    EXPECT_EQ(m.rf_slope, 10.1);
    EXPECT_EQ(circuit_model(PowerModel::Practical), m);
    EXPECT_EQ(circuit_model(PowerModel::Unrealistic), CircuitPowerModel{});
}

TEST(CircuitPower, BasebandRow)
{
    const auto m = CircuitPowerModel::practical();
    EXPECT_DOUBLE_EQ(baseband_power_w(0.0, m), 2.110);
    EXPECT_DOUBLE_EQ(baseband_power_w(10e6, m), 2.1187);
    EXPECT_EQ(baseband_power_w(10e6, CircuitPowerModel::unrealistic()), 0.0);
}

TEST(CircuitPower, RfRow)
{
    const auto m = CircuitPowerModel::practical();
    EXPECT_DOUBLE_EQ(rf_power_w(0.0, m), 0.6);
    EXPECT_DOUBLE_EQ(rf_power_w(2.0, m), 20.8);
    EXPECT_EQ(rf_power_w(2.0, CircuitPowerModel::unrealistic()), 0.0);
}

TEST(CircuitPower, RowsAreAffine)
{
    const auto m = CircuitPowerModel::practical();
    // Inputs 0, 4, 8 are collinear and exactly representable.
    EXPECT_DOUBLE_EQ(rf_power_w(4.0, m) - rf_power_w(0.0, m), rf_power_w(8.0, m) - rf_power_w(4.0, m));
    EXPECT_DOUBLE_EQ(baseband_power_w(4e6, m) - baseband_power_w(0.0, m), baseband_power_w(8e6, m) - baseband_power_w(4e6, m));
}

TEST(CpuCycleEnergy, QuadraticInFrequency)
{
    EXPECT_DOUBLE_EQ(cpu_cycle_energy_j(1e9, 1e-27), 1e-9);
    EXPECT_DOUBLE_EQ(cpu_cycle_energy_j(1e9, 1e-25), 1e-7);
    EXPECT_DOUBLE_EQ(cpu_cycle_energy_j(2e9, 1e-25), 4.0 * cpu_cycle_energy_j(1e9, 1e-25));
}

TEST(IdlePower, UnrealisticModelZeroesIt)
{
    NetworkConfig cfg;
    const Device d = Device::make(0.05, 4e6, 100, 2.0, 2.75, cfg);
    EXPECT_EQ(effective_idle_power_w(d, cfg), 2.75);
    cfg.power_model = PowerModel::Unrealistic;
    EXPECT_EQ(effective_idle_power_w(d, cfg), 0.0);
}
