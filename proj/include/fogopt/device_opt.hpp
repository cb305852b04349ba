#pragma once
#include <array>
#include <cmath>
#include <optional>

#include "fogopt/convex.hpp"
#include "fogopt/metrics.hpp"

namespace fogopt {

// Lower limits of the normalized decision variables: f >= 1e-6 fbar0 and
// p >= 1e-9 pbar keep the rate and the execution time finite.
inline constexpr double min_freq_fraction = 1e-6;
inline constexpr double min_power_fraction = 1e-9;

struct IdealPoint
{
    double t_min_s = 0.0;
    double e_min_j = 0.0;
    double argmin_f_hz = 0.0;
    double argmin_p_w = 0.0;
    // argmin_f sits on the f >= 1e-6 fbar0 clamp (the energy infimum is at f -> 0).
    bool f_clamped = false;
    FractionalState state;
};

struct TchebyshevSetting
{
    double eta = 0.5;

    void validate() const
    {
        if (!(eta > 0.0 && eta < 1.0))
            throw ValidationError("eta must lie in the open interval (0, 1)");
    }
};

// psi_k: allocation of one device plus its epigraph slack.
struct DeviceState
{
    double f_hz = 0.0;
    double p_w = 0.0;
    double y = 0.0;
};

struct DeviceSolution
{
    DeviceState state;
    LatencyEnergy metrics;
    FractionalState fractional;
};

namespace detail {

// Wraps an expression of up to three local coordinates into a ConvexFunction
// over the full vector. Index -1 feeds a constant 0. The expression is a
// generic callable evaluated with double for values and Jet<3> for
// derivatives.
template <class Expr>
ConvexFunction local_function(std::array<Eigen::Index, 3> idx, Expr expr)
{
    return [idx, expr](const Vector& x, Vector* grad, Matrix* hess) -> double {
        if (!grad && !hess) {
            const double a = idx[0] >= 0 ? x[idx[0]] : 0.0;
            const double b = idx[1] >= 0 ? x[idx[1]] : 0.0;
            const double c = idx[2] >= 0 ? x[idx[2]] : 0.0;
            return expr(a, b, c);
        }
        std::array<Jet<3>, 3> in;
        for (std::size_t i = 0; i < 3; ++i)
            in[i] = idx[i] >= 0 ? Jet<3>::variable(x[idx[i]], i) : Jet<3>(0.0);
        const Jet<3> r = expr(in[0], in[1], in[2]);
        if (grad) {
            grad->setZero();
            for (std::size_t i = 0; i < 3; ++i)
                if (idx[i] >= 0) (*grad)[idx[i]] += r.g[i];
        }
        if (hess) {
            hess->setZero();
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    if (idx[i] >= 0 && idx[j] >= 0) (*hess)(idx[i], idx[j]) += r.hess(i, j);
        }
        return r.v;
    };
}

// Tchebyshev residuals eta (T - Tmin) and (1 - eta)(E - Emin) with exact E.
inline std::pair<double, double> tchebyshev_residuals(const Device& d, double f_hz, double p_w, double eta,
                                                      const IdealPoint& ideal, const NetworkConfig& cfg)
{
    const double t = latency_expr(d, f_hz, p_w, cfg);
    const double e = energy_expr(d, f_hz, p_w, cfg);
    return {eta * (t - ideal.t_min_s), (1.0 - eta) * (e - ideal.e_min_j)};
}

// Constraint eta (T(f, p) - Tmin) - y <= 0 over coordinates (u, v, y).
inline ConvexFunction latency_constraint(const Device& d, const NetworkConfig& cfg, double eta, double t_min,
                                         std::array<Eigen::Index, 3> idx)
{
    const double fs = cfg.cpu_cap_hz, ps = d.max_power_w;
    return local_function(idx, [d, cfg, eta, t_min, fs, ps](const auto& u, const auto& v, const auto& y) {
        return eta * (latency_expr(d, u * fs, v * ps, cfg) - t_min) - y;
    });
}

// Constraint (1 - eta)(E(f, p; t) - Emin) - y <= 0 with the surrogate energy.
inline ConvexFunction energy_constraint(const Device& d, const NetworkConfig& cfg, double eta, double e_min,
                                        double t_mult, std::array<Eigen::Index, 3> idx)
{
    const double fs = cfg.cpu_cap_hz, ps = d.max_power_w;
    return local_function(idx, [d, cfg, eta, e_min, t_mult, fs, ps](const auto& u, const auto& v, const auto& y) {
        return (1.0 - eta) * (energy_expr(d, u * fs, v * ps, cfg, t_mult) - e_min) - y;
    });
}

inline double interior_clamp(double x, double lo, double hi, double frac = 1e-6)
{
    const double pad = frac * (hi - lo);
    return std::clamp(x, lo + pad, hi - pad);
}

} // namespace detail

// Minimum latency: T is decreasing in f and p, so it is attained at (fbar0, pbar).
inline double ideal_latency(const Device& d, const NetworkConfig& cfg)
{
    return latency(d, cfg.cpu_cap_hz, d.max_power_w, cfg).t_total_s;
}

/*
 * Minimum energy over the box (0, fbar0] x (0, pbar]. The p / R ratio in the
 * transmit energy is handled with the quadratic-transform loop; each inner
 * problem is a smooth convex program in (f / fbar0, p / pbar).
 */
inline IdealPoint ideal_energy(const Device& d, const NetworkConfig& cfg, const FractionalOptions& opts = {})
{
    const double fs = cfg.cpu_cap_hz, ps = d.max_power_w;

    FractionalProblem fp;
    fp.convexify = [&](const std::vector<double>& t) {
        ConvexProblem cp;
        cp.dimension = 2;
        const double tm = t[0];
        cp.objective = detail::local_function({0, 1, -1}, [&d, &cfg, tm, fs, ps](const auto& u, const auto& v, const auto&) {
            return energy_expr(d, u * fs, v * ps, cfg, tm);
        });
        cp.lower = Vector{{min_freq_fraction, min_power_fraction}};
        cp.upper = Vector{{1.0, 1.0}};
        cp.objective_scale = 1e-300;
        return cp;
    };
    fp.ratio_parts = [&](const Vector& x) {
        const double p = x[1] * ps;
        return std::vector<std::pair<double, double>>{{p, data_rate(p, d.gain, cfg)}};
    };
    fp.true_objective = [&](const Vector& x) { return energy_expr(d, x[0] * fs, x[1] * ps, cfg); };

    const FractionalResult r = minimize_fractional(fp, Vector{{0.5, 0.5}}, opts);

    IdealPoint ip;
    ip.t_min_s = ideal_latency(d, cfg);
    ip.argmin_f_hz = r.x[0] * fs;
    ip.argmin_p_w = r.x[1] * ps;
    ip.e_min_j = energy_expr(d, ip.argmin_f_hz, ip.argmin_p_w, cfg);
    ip.f_clamped = r.x[0] <= min_freq_fraction * (1.0 + 1e-3);
    ip.state = r.state;
    return ip;
}

/*
 * Epigraph form of the weighted Tchebyshev problem for one device:
 *
 *   min y  s.t.  eta (T - Tmin) <= y,  (1 - eta)(E(f, p; t) - Emin) <= y,
 *                f <= f_budget,  0 < p <= pbar
 *
 * with the energy constraint convexified per multiplier t and t iterated to
 * its fixed point.
 */
inline DeviceSolution solve_tchebyshev_single(const Device& d, double eta, double f_budget_hz,
                                              const NetworkConfig& cfg, const IdealPoint& ideal,
                                              const FractionalOptions& opts = {},
                                              std::optional<DeviceState> warm_start = std::nullopt)
{
    TchebyshevSetting{eta}.validate();
    if (!(f_budget_hz > 0.0) || f_budget_hz > cfg.cpu_cap_hz * (1.0 + 1e-12))
        throw ValidationError("solve_tchebyshev_single: f_budget must lie in (0, cpu_cap_hz]");

    const double fs = cfg.cpu_cap_hz, ps = d.max_power_w;
    const double budget = std::min(1.0, f_budget_hz / fs);
    const double scale = eta * ideal.t_min_s + (1.0 - eta) * ideal.e_min_j;

    auto required_y = [&](const Vector& x) {
        const auto [rt, re] = detail::tchebyshev_residuals(d, x[0] * fs, x[1] * ps, eta, ideal, cfg);
        return std::max(rt, re);
    };

    FractionalProblem fp;
    fp.convexify = [&](const std::vector<double>& t) {
        ConvexProblem cp;
        cp.dimension = 3;
        cp.objective = detail::local_function({-1, -1, 2}, [](const auto&, const auto&, const auto& y) { return y; });
        cp.constraints = {
            detail::latency_constraint(d, cfg, eta, ideal.t_min_s, {0, 1, 2}),
            detail::energy_constraint(d, cfg, eta, ideal.e_min_j, t[0], {0, 1, 2}),
        };
        const double inf = std::numeric_limits<double>::infinity();
        cp.lower = Vector{{min_freq_fraction, min_power_fraction, -inf}};
        cp.upper = Vector{{budget, 1.0, inf}};
        cp.objective_scale = 1e-12 * scale;
        return cp;
    };
    fp.ratio_parts = [&](const Vector& x) {
        const double p = x[1] * ps;
        return std::vector<std::pair<double, double>>{{p, data_rate(p, d.gain, cfg)}};
    };
    fp.true_objective = required_y;
    fp.restart = [&](const Vector& x) {
        Vector s = x;
        const double need = required_y(s);
        const double floor_y = need + 1e-9 * std::abs(need) + 1e-14 * scale;
        if (!(s[2] > floor_y)) s[2] = floor_y;
        return s;
    };

    Vector x0(3);
    if (warm_start) {
        x0[0] = detail::interior_clamp(warm_start->f_hz / fs, min_freq_fraction, budget);
        x0[1] = detail::interior_clamp(warm_start->p_w / ps, min_power_fraction, 1.0);
    } else {
        x0[0] = 0.5 * budget;
        x0[1] = 0.5;
    }
    x0[2] = required_y(x0);
    x0 = fp.restart(x0);

    const FractionalResult r = minimize_fractional(fp, x0, opts);

    DeviceSolution sol;
    sol.state = {r.x[0] * fs, r.x[1] * ps, r.x[2]};
    sol.metrics = evaluate(d, sol.state.f_hz, sol.state.p_w, cfg);
    sol.fractional = r.state;
    return sol;
}

inline DeviceSolution solve_tchebyshev_single(const Device& d, double eta, double f_budget_hz,
                                              const NetworkConfig& cfg, const FractionalOptions& opts = {})
{
    return solve_tchebyshev_single(d, eta, f_budget_hz, cfg, ideal_energy(d, cfg, opts), opts);
}

} // namespace fogopt
