#include <gtest/gtest.h>

#include <cmath>

#include "fogopt/device_opt.hpp"
#include "fogopt/experiments.hpp"
#include "fogopt/oracle.hpp"

using namespace fogopt;

namespace {

NetworkConfig narrowband()
{
    NetworkConfig cfg;
    cfg.bandwidth_hz = 1e5;
    return cfg;
}

// Mid-range device of the reference setup.
Device mid_device(const NetworkConfig& cfg)
{
    return Device::make(0.05, 4.8e6, 150, 2.0, 2.75, cfg);
}

} // namespace

TEST(IdealLatency, ClosedFormReference)
{
    const NetworkConfig cfg = narrowband();
    const Device d = Device::make(0.05, 4e6, 100, 2.0, 2.75, cfg);
    EXPECT_NEAR(ideal_latency(d, cfg), 1.403221414771106, 1e-12);
}

TEST(IdealLatency, NoGridPointBeatsIt)
{
    const NetworkConfig cfg = narrowband();
    const Device d = mid_device(cfg);
    const GridPoint g = grid_min_single(d, cfg, GridObjective::Latency, GridSpec::standard({d}, cfg, 200));
    EXPECT_EQ(g.value, ideal_latency(d, cfg));
    EXPECT_EQ(g.f_index, 199);
    EXPECT_EQ(g.p_index, 199);
}

TEST(IdealLatency, DecreasesWithCpuCapacity)
{
    NetworkConfig cfg = narrowband();
    const Device d = mid_device(cfg);
    const double t1 = ideal_latency(d, cfg);
    cfg.cpu_cap_hz *= 2.0;
    EXPECT_LT(ideal_latency(d, cfg), t1);
}

TEST(IdealEnergy, PracticalMatchesGrid)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const GridPoint g = grid_min_single(d, cfg, GridObjective::Energy,
                                        GridSpec::standard({d}, cfg, 300, min_freq_fraction, min_power_fraction));
    EXPECT_LE(ip.e_min_j, g.value);
    EXPECT_GE(ip.e_min_j, g.value - g.cell_variation);
    EXPECT_FALSE(ip.f_clamped);
    EXPECT_LE(ip.e_min_j, energy(d, cfg.cpu_cap_hz, d.max_power_w, cfg).e_total_j);
    EXPECT_EQ(ip.t_min_s, ideal_latency(d, cfg));
}

TEST(IdealEnergy, UnrealisticModelClampsFrequency)
{
    NetworkConfig cfg;
    cfg.power_model = PowerModel::Unrealistic;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    EXPECT_TRUE(ip.f_clamped);
    EXPECT_NEAR(ip.argmin_f_hz, min_freq_fraction * cfg.cpu_cap_hz, 1e-3 * min_freq_fraction * cfg.cpu_cap_hz);
    EXPECT_LE(ip.e_min_j, energy(d, cfg.cpu_cap_hz, d.max_power_w, cfg).e_total_j);
}

TEST(IdealEnergy, NeverAboveRandomFeasiblePoints)
{
    const NetworkConfig cfg;
    CounterRng rng(17, 0);
    for (int i = 0; i < 10; ++i) {
        const Device d = Device::make(rng.uniform(0.01, 0.07), rng.uniform(8e5, 8.8e6), rng.uniform(50, 250), 2.0,
                                      rng.uniform(2, 3.5), cfg);
        const IdealPoint ip = ideal_energy(d, cfg);
        for (int j = 0; j < 200; ++j) {
            const double f = rng.uniform(1e6, cfg.cpu_cap_hz), p = rng.uniform(1e-6, 2.0);
            EXPECT_LE(ip.e_min_j, energy(d, f, p, cfg).e_total_j);
        }
    }
}

TEST(Tchebyshev, RejectsEndpointsAndBadBudget)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    EXPECT_THROW(solve_tchebyshev_single(d, 0.0, cfg.cpu_cap_hz, cfg), ValidationError);
    EXPECT_THROW(solve_tchebyshev_single(d, 1.0, cfg.cpu_cap_hz, cfg), ValidationError);
    EXPECT_THROW(solve_tchebyshev_single(d, 0.5, 2.0 * cfg.cpu_cap_hz, cfg), ValidationError);
    EXPECT_THROW(solve_tchebyshev_single(d, 0.5, 0.0, cfg), ValidationError);
}

// Each ideal argmin is feasible with one residual at zero, which bounds the
// other residual at the optimum.
TEST(Tchebyshev, NearEnergyEndApproachesMinimumEnergy)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const double eta = 1e-3;
    const DeviceSolution s = solve_tchebyshev_single(d, eta, cfg.cpu_cap_hz, cfg, ip);
    const double t_at_emin = latency(d, ip.argmin_f_hz, ip.argmin_p_w, cfg).t_total_s;
    EXPECT_LE((1 - eta) * (s.metrics.e_total_j - ip.e_min_j), eta * (t_at_emin - ip.t_min_s) * (1 + 1e-6));
    EXPECT_LE(s.metrics.e_total_j, 1.01 * ip.e_min_j);
}

TEST(Tchebyshev, NearLatencyEndApproachesMinimumLatency)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const double eta = 1 - 1e-3;
    const DeviceSolution s = solve_tchebyshev_single(d, eta, cfg.cpu_cap_hz, cfg, ip);
    const double e_at_tmin = energy(d, cfg.cpu_cap_hz, d.max_power_w, cfg).e_total_j;
    EXPECT_LE(eta * (s.metrics.t_total_s - ip.t_min_s), (1 - eta) * (e_at_tmin - ip.e_min_j) * (1 + 1e-6));
    EXPECT_LT(s.metrics.t_total_s, latency(d, ip.argmin_f_hz, ip.argmin_p_w, cfg).t_total_s);
}

TEST(Tchebyshev, ResidualsEqualizeOnTradeoff)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    for (double eta : {0.1, 0.5, 0.9}) {
        const DeviceSolution s = solve_tchebyshev_single(d, eta, cfg.cpu_cap_hz, cfg, ip);
        const double rt = eta * (s.metrics.t_total_s - ip.t_min_s);
        const double re = (1 - eta) * (s.metrics.e_total_j - ip.e_min_j);
        EXPECT_NEAR(rt, re, 1e-6 * s.state.y) << "eta " << eta;
        EXPECT_NEAR(s.state.y, std::max(rt, re), 1e-6 * s.state.y);
        EXPECT_GT(s.state.y, 0.0);
    }
}

TEST(Tchebyshev, MatchesGridOfTheScalarizedProblem)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const GridSpec grid = GridSpec::standard({d}, cfg, 300, min_freq_fraction, 1e-3);
    for (double eta : {0.05, 0.5, 0.95}) {
        const DeviceSolution s = solve_tchebyshev_single(d, eta, cfg.cpu_cap_hz, cfg, ip);
        const GridPoint g = grid_min_single(d, cfg, GridObjective::TchebyshevY, grid, eta, &ip);
        const auto [rt, re] = detail::tchebyshev_residuals(d, s.state.f_hz, s.state.p_w, eta, ip, cfg);
        const double y = std::max(rt, re);
        EXPECT_LE(y, g.value * (1 + 1e-9)) << "eta " << eta;
        EXPECT_GE(y, g.value - g.cell_variation) << "eta " << eta;
    }
}

TEST(Tchebyshev, ParetoMonotoneInEta)
{
    for (auto model : {PowerModel::Practical, PowerModel::Unrealistic}) {
        NetworkConfig cfg;
        cfg.power_model = model;
        const Device d = mid_device(cfg);
        const IdealPoint ip = ideal_energy(d, cfg);
        double prev_t = std::numeric_limits<double>::infinity(), prev_e = 0.0;
        for (double eta : eta_grid(20)) {
            const DeviceSolution s = solve_tchebyshev_single(d, eta, cfg.cpu_cap_hz, cfg, ip);
            EXPECT_LE(s.metrics.t_total_s, prev_t * (1 + 1e-6)) << "eta " << eta;
            EXPECT_GE(s.metrics.e_total_j, prev_e * (1 - 1e-6)) << "eta " << eta;
            prev_t = s.metrics.t_total_s;
            prev_e = s.metrics.e_total_j;
        }
    }
}

TEST(Tchebyshev, StartingPointInvariance)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const DeviceSolution a = solve_tchebyshev_single(d, 0.4, cfg.cpu_cap_hz, cfg, ip, {}, DeviceState{1e7, 1.9, 0});
    const DeviceSolution b = solve_tchebyshev_single(d, 0.4, cfg.cpu_cap_hz, cfg, ip, {}, DeviceState{1.1e9, 1e-6, 0});
    EXPECT_NEAR(a.state.y, b.state.y, 1e-6 * a.state.y);
    EXPECT_NEAR(a.state.f_hz, b.state.f_hz, 1e-3 * a.state.f_hz);
    EXPECT_NEAR(a.state.p_w, b.state.p_w, 1e-3 * a.state.p_w);
}

TEST(Tchebyshev, BudgetIsRespected)
{
    const NetworkConfig cfg;
    const Device d = mid_device(cfg);
    const IdealPoint ip = ideal_energy(d, cfg);
    const DeviceSolution s = solve_tchebyshev_single(d, 0.9, 0.2e9, cfg, ip);
    EXPECT_LE(s.state.f_hz, 0.2e9);
    EXPECT_GT(s.state.f_hz, 0.19e9);
}
