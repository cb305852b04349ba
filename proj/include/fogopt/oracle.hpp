#pragma once
#include <cmath>
#include <limits>
#include <vector>

#include "fogopt/device_opt.hpp"

namespace fogopt {

enum class Spacing { Linear, Log };

struct Axis
{
    double lo = 0.0;
    double hi = 0.0;
    Spacing spacing = Spacing::Linear;

    double at(int i, int n) const
    {
        if (n == 1) return hi;
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        if (spacing == Spacing::Log) return i == n - 1 ? hi : lo * std::pow(hi / lo, s);
        return i == n - 1 ? hi : lo + (hi - lo) * s;
    }
};

struct GridSpec
{
    static constexpr double max_points = 1e8;

    int points_per_axis = 30;
    std::vector<Axis> f_axes;
    std::vector<Axis> p_axes;

    // Linear f on [f_lo_frac fbar0, fbar0], log-spaced p on [p_lo_frac pbar, pbar].
    static GridSpec standard(const std::vector<Device>& devices, const NetworkConfig& cfg, int points,
                             double f_lo_frac = min_freq_fraction, double p_lo_frac = 1e-4)
    {
        GridSpec g;
        g.points_per_axis = points;
        for (const auto& d : devices) {
            g.f_axes.push_back({f_lo_frac * cfg.cpu_cap_hz, cfg.cpu_cap_hz, Spacing::Linear});
            g.p_axes.push_back({p_lo_frac * d.max_power_w, d.max_power_w, Spacing::Log});
        }
        return g;
    }

    void validate(std::size_t devices) const
    {
        if (points_per_axis < 10) throw ValidationError("grid: points_per_axis must be >= 10");
        if (f_axes.size() != devices || p_axes.size() != devices)
            throw ValidationError("grid: one f axis and one p axis per device required");
        const double total = std::pow(static_cast<double>(points_per_axis), 2.0 * static_cast<double>(devices));
        if (total > max_points) throw ValidationError("grid: more than 1e8 points");
        for (const auto* axes : {&f_axes, &p_axes})
            for (const Axis& a : *axes)
                if (!(a.lo > 0.0) || !(a.hi >= a.lo)) throw ValidationError("grid: axes need 0 < lo <= hi");
    }
};

enum class GridObjective { Energy, Latency, TchebyshevY };

struct GridPoint
{
    double value = std::numeric_limits<double>::infinity();
    double f_hz = 0.0;
    double p_w = 0.0;
    int f_index = -1;
    int p_index = -1;
    // Largest change of the objective between the argmin and a grid neighbour.
    double cell_variation = 0.0;
};

namespace detail {

inline double grid_objective(const Device& d, double f, double p, const NetworkConfig& cfg, GridObjective obj,
                             double eta, const IdealPoint* ideal)
{
    switch (obj) {
    case GridObjective::Energy: return energy_expr(d, f, p, cfg);
    case GridObjective::Latency: return latency_expr(d, f, p, cfg);
    case GridObjective::TchebyshevY: {
        const auto [rt, re] = tchebyshev_residuals(d, f, p, eta, *ideal, cfg);
        return std::max(rt, re);
    }
    }
    return 0.0;
}

// Objective values table[i * n + j] at f index i, p index j.
inline std::vector<double> grid_table(const Device& d, const Axis& fa, const Axis& pa, int n, const NetworkConfig& cfg,
                                      GridObjective obj, double eta, const IdealPoint* ideal)
{
    std::vector<double> t(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            t[static_cast<std::size_t>(i * n + j)] = grid_objective(d, fa.at(i, n), pa.at(j, n), cfg, obj, eta, ideal);
    return t;
}

inline double neighbour_variation(const std::vector<double>& t, int n, int i, int j)
{
    double v = 0.0;
    const double c = t[static_cast<std::size_t>(i * n + j)];
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
            const int a = i + di, b = j + dj;
            if (a < 0 || b < 0 || a >= n || b >= n) continue;
            v = std::max(v, std::abs(t[static_cast<std::size_t>(a * n + b)] - c));
        }
    return v;
}

} // namespace detail

/*
 * Exhaustive minimum of the exact (non-surrogate) objective over the grid
 * of device 0's axes. TchebyshevY needs eta and the ideal point.
 */
inline GridPoint grid_min_single(const Device& d, const NetworkConfig& cfg, GridObjective obj, const GridSpec& grid,
                                 double eta = 0.5, const IdealPoint* ideal = nullptr)
{
    grid.validate(1);
    if (obj == GridObjective::TchebyshevY) {
        TchebyshevSetting{eta}.validate();
        if (!ideal) throw ValidationError("grid_min_single: TchebyshevY needs the ideal point");
    }
    const int n = grid.points_per_axis;
    const auto t = detail::grid_table(d, grid.f_axes[0], grid.p_axes[0], n, cfg, obj, eta, ideal);
    GridPoint best;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (const double v = t[static_cast<std::size_t>(i * n + j)]; v < best.value) {
                best.value = v;
                best.f_index = i;
                best.p_index = j;
            }
    best.f_hz = grid.f_axes[0].at(best.f_index, n);
    best.p_w = grid.p_axes[0].at(best.p_index, n);
    best.cell_variation = detail::neighbour_variation(t, n, best.f_index, best.p_index);
    return best;
}

struct GridProduct
{
    double value = std::numeric_limits<double>::infinity();
    Allocation allocation;
    std::vector<double> y;
};

/*
 * Minimum of prod_k y_k over grid points with sum f_k <= fbar0, for K <= 3.
 * The factors are nonnegative and device k's p only enters y_k, so for each
 * f index the p axis is minimized per device first; the product search
 * then runs over f indices only. The result equals the full enumeration.
 */
inline GridProduct grid_min_product(const std::vector<Device>& devices, const NetworkConfig& cfg, double eta,
                                    const std::vector<IdealPoint>& ideals, const GridSpec& grid)
{
    const std::size_t K = devices.size();
    if (K == 0 || K > 3) throw ValidationError("grid_min_product: supports 1 to 3 devices");
    if (ideals.size() != K) throw ValidationError("grid_min_product: one ideal point per device required");
    TchebyshevSetting{eta}.validate();
    grid.validate(K);
    const int n = grid.points_per_axis;

    // best_y[k][i], best_p[k][i]: minimum of y_k over p at f index i.
    std::vector<std::vector<double>> best_y(K, std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<int>> best_p(K, std::vector<int>(static_cast<std::size_t>(n)));
    for (std::size_t k = 0; k < K; ++k) {
        const auto t = detail::grid_table(devices[k], grid.f_axes[k], grid.p_axes[k], n, cfg,
                                          GridObjective::TchebyshevY, eta, &ideals[k]);
        for (int i = 0; i < n; ++i) {
            double m = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int j = 0; j < n; ++j)
                if (const double v = t[static_cast<std::size_t>(i * n + j)]; v < m) {
                    m = v;
                    arg = j;
                }
            best_y[k][static_cast<std::size_t>(i)] = m;
            best_p[k][static_cast<std::size_t>(i)] = arg;
        }
    }

    const double cap = cfg.cpu_cap_hz;
    GridProduct out;
    std::vector<int> idx(K, 0), arg;
    // Odometer over the K f indices.
    while (true) {
        double fsum = 0.0, prod = 1.0;
        for (std::size_t k = 0; k < K; ++k) {
            fsum += grid.f_axes[k].at(idx[k], n);
            prod *= best_y[k][static_cast<std::size_t>(idx[k])];
        }
        if (fsum <= cap * (1.0 + 1e-12) && prod < out.value) {
            out.value = prod;
            arg = idx;
        }
        std::size_t k = 0;
        while (k < K && ++idx[k] == n) idx[k++] = 0;
        if (k == K) break;
    }
    if (arg.empty()) throw ValidationError("grid_min_product: no grid point satisfies the CPU cap");

    for (std::size_t k = 0; k < K; ++k) {
        const int i = arg[k];
        out.allocation.freqs_hz.push_back(grid.f_axes[k].at(i, n));
        out.allocation.powers_w.push_back(grid.p_axes[k].at(best_p[k][static_cast<std::size_t>(i)], n));
        out.y.push_back(best_y[k][static_cast<std::size_t>(i)]);
    }
    return out;
}

} // namespace fogopt
