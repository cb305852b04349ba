#pragma once
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogopt/device_opt.hpp"
#include "fogopt/rng.hpp"

namespace fogopt {

// Slacks below this are floored before the multiplier update; a zero slack
// means a device sits on both of its ideal points at once.
inline constexpr double y_floor = 1e-12;

struct GameState
{
    Allocation allocation;
    std::vector<double> y;
    std::vector<double> mu;
};

struct EquilibriumReport
{
    GameState state;
    // Tchebyshev slacks recomputed from the exact objectives at the allocation.
    std::vector<double> y_exact;
    double product_utility = 0.0;
    std::vector<LatencyEnergy> per_device;
    int iterations = 0;
    std::vector<double> objective_trace;
    bool converged = false;
    bool y_floored = false;
};

struct NbsOptions
{
    double rel_tol = 1e-6;
    int max_iterations = 500;
    FractionalOptions fractional;
};

// Devices of one scenario together with their ideal points.
struct GameInstance
{
    std::vector<Device> devices;
    NetworkConfig cfg;
    std::vector<IdealPoint> ideals;

    static GameInstance make(std::vector<Device> devices, const NetworkConfig& cfg,
                             const FractionalOptions& opts = {})
    {
        GameInstance g{std::move(devices), cfg, {}};
        g.ideals.reserve(g.devices.size());
        for (const auto& d : g.devices) g.ideals.push_back(ideal_energy(d, cfg, opts));
        return g;
    }

    std::size_t size() const { return devices.size(); }
};

struct MuStep
{
    std::vector<double> mu;
    bool floored = false;
};

/*
 * Multiplier block of the relaxed product problem:
 *   min sum mu_k y_k  s.t.  prod mu_k >= 1, mu >= 0
 * Closed form mu_k = G / y_k with G the geometric mean of y, which gives
 * prod mu_k = 1 and objective K G.
 */
inline MuStep mu_step(std::span<const double> y)
{
    if (y.empty()) throw ValidationError("mu_step: empty slack vector");
    MuStep out;
    std::vector<double> yy(y.begin(), y.end());
    for (double& v : yy) {
        if (!std::isfinite(v) || v < -1e-9)
            throw DomainError("mu_step: slacks must be finite and nonnegative");
        if (v < y_floor) {
            v = y_floor;
            out.floored = true;
        }
    }
    double mean_log = 0.0;
    for (double v : yy) mean_log += std::log(v);
    mean_log /= static_cast<double>(yy.size());
    const double g = std::exp(mean_log);
    out.mu.reserve(yy.size());
    for (double v : yy) out.mu.push_back(g / v);
    return out;
}

inline double weighted_slack_sum(std::span<const double> mu, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) s += mu[k] * y[k];
    return s;
}

inline std::vector<double> exact_slacks(const GameInstance& g, const Allocation& a, double eta)
{
    std::vector<double> y(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto [rt, re] = detail::tchebyshev_residuals(g.devices[k], a.freqs_hz[k], a.powers_w[k], eta,
                                                           g.ideals[k], g.cfg);
        y[k] = std::max(rt, re);
    }
    return y;
}

/*
 * Allocation block: for fixed mu,
 *   min sum mu_k y_k  over (f, p, y)
 *   s.t. every device's latency and (surrogate) energy epigraph constraints,
 *        sum f_k <= fbar0, box bounds on f and p.
 * Each device's energy constraint carries its own multiplier t_k, iterated
 * to its fixed point. Warm-started from prev.
 */
inline GameState psi_step(std::span<const double> mu, const GameState& prev, const GameInstance& g, double eta,
                          const FractionalOptions& opts = {})
{
    TchebyshevSetting{eta}.validate();
    const std::size_t K = g.size();
    if (mu.size() != K || prev.allocation.size() != K || prev.y.size() != K)
        throw ValidationError("psi_step: size mismatch");
    const auto n = static_cast<Eigen::Index>(3 * K);
    const double fs = g.cfg.cpu_cap_hz;
    const auto ui = [](std::size_t k) { return static_cast<Eigen::Index>(k); };
    const auto vi = [K](std::size_t k) { return static_cast<Eigen::Index>(K + k); };
    const auto yi = [K](std::size_t k) { return static_cast<Eigen::Index>(2 * K + k); };

    double scale = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        scale += mu[k] * (eta * g.ideals[k].t_min_s + (1.0 - eta) * g.ideals[k].e_min_j);

    auto required_y = [&](const Vector& x, std::size_t k) {
        const auto [rt, re] = detail::tchebyshev_residuals(g.devices[k], x[ui(k)] * fs,
                                                           x[vi(k)] * g.devices[k].max_power_w, eta, g.ideals[k], g.cfg);
        return std::max(rt, re);
    };

    const std::vector<double> weights(mu.begin(), mu.end());
    FractionalProblem fp;
    fp.convexify = [&](const std::vector<double>& t) {
        ConvexProblem cp;
        cp.dimension = static_cast<std::size_t>(n);
        cp.objective = [weights, K, n](const Vector& x, Vector* grad, Matrix* hess) {
            double v = 0.0;
            if (grad) grad->setZero();
            if (hess) hess->setZero();
            for (std::size_t k = 0; k < K; ++k) {
                v += weights[k] * x[static_cast<Eigen::Index>(2 * K + k)];
                if (grad) (*grad)[static_cast<Eigen::Index>(2 * K + k)] = weights[k];
            }
            (void)n;
            return v;
        };
        for (std::size_t k = 0; k < K; ++k) {
            const Device& d = g.devices[k];
            cp.constraints.push_back(
                detail::latency_constraint(d, g.cfg, eta, g.ideals[k].t_min_s, {ui(k), vi(k), yi(k)}));
            cp.constraints.push_back(
                detail::energy_constraint(d, g.cfg, eta, g.ideals[k].e_min_j, t[k], {ui(k), vi(k), yi(k)}));
        }
        cp.constraints.push_back([K](const Vector& x, Vector* grad, Matrix* hess) {
            double s = -1.0;
            if (grad) grad->setZero();
            if (hess) hess->setZero();
            for (std::size_t k = 0; k < K; ++k) {
                s += x[static_cast<Eigen::Index>(k)];
                if (grad) (*grad)[static_cast<Eigen::Index>(k)] = 1.0;
            }
            return s;
        });
        const double inf = std::numeric_limits<double>::infinity();
        cp.lower = Vector::Constant(n, -inf);
        cp.upper = Vector::Constant(n, inf);
        for (std::size_t k = 0; k < K; ++k) {
            cp.lower[ui(k)] = min_freq_fraction;
            cp.upper[ui(k)] = 1.0;
            cp.lower[vi(k)] = min_power_fraction;
            cp.upper[vi(k)] = 1.0;
        }
        cp.objective_scale = 1e-12 * scale;
        return cp;
    };
    fp.ratio_parts = [&](const Vector& x) {
        std::vector<std::pair<double, double>> parts;
        for (std::size_t k = 0; k < K; ++k) {
            const double p = x[vi(k)] * g.devices[k].max_power_w;
            parts.emplace_back(p, data_rate(p, g.devices[k].gain, g.cfg));
        }
        return parts;
    };
    fp.true_objective = [&](const Vector& x) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += weights[k] * required_y(x, k);
        return s;
    };
    fp.restart = [&](const Vector& x) {
        Vector s = x;
        for (std::size_t k = 0; k < K; ++k) {
            const double need = required_y(s, k);
            const double floor_y = need + 1e-9 * std::abs(need) + 1e-14 * scale / weights[k];
            if (!(s[yi(k)] > floor_y)) s[yi(k)] = floor_y;
        }
        return s;
    };

    Vector x0(n);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        x0[ui(k)] = detail::interior_clamp(prev.allocation.freqs_hz[k] / fs, min_freq_fraction, 1.0);
        x0[vi(k)] = detail::interior_clamp(prev.allocation.powers_w[k] / g.devices[k].max_power_w,
                                           min_power_fraction, 1.0);
        total += x0[ui(k)];
    }
    constexpr double cap_margin = 1e-6;
    if (total > 1.0 - cap_margin)
        for (std::size_t k = 0; k < K; ++k) x0[ui(k)] *= (1.0 - cap_margin) / total;
    for (std::size_t k = 0; k < K; ++k) x0[yi(k)] = prev.y[k];
    x0 = fp.restart(x0);

    const FractionalResult r = minimize_fractional(fp, x0, opts);

    GameState out;
    out.mu = weights;
    out.allocation.freqs_hz.resize(K);
    out.allocation.powers_w.resize(K);
    out.y.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        out.allocation.freqs_hz[k] = r.x[ui(k)] * fs;
        out.allocation.powers_w[k] = r.x[vi(k)] * g.devices[k].max_power_w;
        out.y[k] = r.x[yi(k)];
    }
    return out;
}

// Algorithm start: p_k ~ Unif[0, pbar_k] (kept above the power floor),
// f_k = fbar0 / K.
inline GameState initial_game_state(const GameInstance& g, std::uint64_t seed)
{
    const std::size_t K = g.size();
    CounterRng rng(seed, 0x6e62735f696e6974ULL);
    GameState s;
    for (std::size_t k = 0; k < K; ++k) {
        const double pbar = g.devices[k].max_power_w;
        const double p = rng.uniform(0.0, pbar);
        s.allocation.freqs_hz.push_back(g.cfg.cpu_cap_hz / static_cast<double>(K));
        s.allocation.powers_w.push_back(std::clamp(p, 1e-6 * pbar, pbar));
    }
    s.y = exact_slacks(g, s.allocation, 0.5);
    s.mu.assign(K, 1.0);
    return s;
}

/*
 * Block coordinate descent on sum mu_k y_k: alternate the closed-form
 * multiplier block and the convex allocation block until the fractional
 * change of the objective is at most rel_tol.
 *
 * warm_start replaces the random initialization (used by eta sweeps).
 * Throws ConvergenceError after max_iterations; the error carries the
 * flattened (f, p) of the best iterate.
 */
inline EquilibriumReport solve_nbs(const GameInstance& g, double eta, std::uint64_t seed, const NbsOptions& opts = {},
                                   const GameState* warm_start = nullptr)
{
    TchebyshevSetting{eta}.validate();
    const std::size_t K = g.size();
    if (K == 0) throw ValidationError("solve_nbs: no devices");

    EquilibriumReport rep;
    GameState state = warm_start ? *warm_start : initial_game_state(g, seed);
    state.y = exact_slacks(g, state.allocation, eta);

    double prev_obj = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const MuStep ms = mu_step(state.y);
        rep.y_floored = rep.y_floored || ms.floored;
        if (std::isnan(prev_obj)) prev_obj = weighted_slack_sum(ms.mu, state.y);
        state = psi_step(ms.mu, state, g, eta, opts.fractional);
        const double obj = weighted_slack_sum(state.mu, state.y);
        rep.objective_trace.push_back(obj);
        rep.iterations = it;
        if (std::abs(prev_obj - obj) <= opts.rel_tol * std::abs(prev_obj)) {
            rep.converged = true;
            break;
        }
        prev_obj = obj;
    }
    if (!rep.converged) {
        std::vector<double> best = state.allocation.freqs_hz;
        best.insert(best.end(), state.allocation.powers_w.begin(), state.allocation.powers_w.end());
        throw ConvergenceError("solve_nbs: no convergence after " + std::to_string(opts.max_iterations)
                               + " iterations", best);
    }

    rep.state = state;
    rep.y_exact = exact_slacks(g, state.allocation, eta);
    rep.product_utility = 1.0;
    for (double v : rep.y_exact) rep.product_utility *= v;
    for (std::size_t k = 0; k < K; ++k)
        rep.per_device.push_back(evaluate(g.devices[k], state.allocation.freqs_hz[k], state.allocation.powers_w[k], g.cfg));
    return rep;
}

inline EquilibriumReport solve_nbs(const std::vector<Device>& devices, const NetworkConfig& cfg, double eta,
                                   std::uint64_t seed, const NbsOptions& opts = {})
{
    return solve_nbs(GameInstance::make(devices, cfg, opts.fractional), eta, seed, opts);
}

struct BaselineReport
{
    Allocation allocation;
    std::vector<LatencyEnergy> per_device;
};

// Non-optimized reference: f_k = fbar0 / K and p_k = pbar_k.
inline BaselineReport equal_share_baseline(const std::vector<Device>& devices, const NetworkConfig& cfg)
{
    BaselineReport r;
    const double f = cfg.cpu_cap_hz / static_cast<double>(devices.size());
    for (const auto& d : devices) {
        r.allocation.freqs_hz.push_back(f);
        r.allocation.powers_w.push_back(d.max_power_w);
        r.per_device.push_back(evaluate(d, f, d.max_power_w, cfg));
    }
    return r;
}

} // namespace fogopt
