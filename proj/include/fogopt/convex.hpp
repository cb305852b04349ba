#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fogopt/errors.hpp"
#include "fogopt/surrogate.hpp"

namespace fogopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/*
 * A twice-differentiable function of the full decision vector. Returns the
 * value; when grad / hess are non-null they are sized to the problem
 * dimension and must be overwritten with the gradient and Hessian.
 */
using ConvexFunction = std::function<double(const Vector& x, Vector* grad, Matrix* hess)>;

/*
 * minimize objective(x)  s.t.  g_i(x) <= 0,  lower <= x <= upper.
 *
 * Convexity of the objective and of every g_i on the box is the caller's
 * contract. Infinite bounds are allowed. objective_scale is the magnitude
 * below which the duality-gap stopping rule switches from relative to
 * absolute.
 */
struct ConvexProblem
{
    std::size_t dimension = 0;
    ConvexFunction objective;
    std::vector<ConvexFunction> constraints;
    Vector lower;
    Vector upper;
    double objective_scale = 1.0;
};

struct SolverOptions
{
    // Stop once the barrier duality gap m / tau <= tol * max(|f0|, objective_scale).
    double tol = 1e-8;
    int max_newton = 10000;
    double barrier_growth = 20.0;
    // Gap the first centering round aims at; <= 0 means max(|f0(x0)|, objective_scale).
    double initial_gap = 0.0;
    // Newton-decrement threshold (lambda^2 / 2) ending a centering round.
    double centering_tol = 1e-10;
    int max_centering = 200;
    // Largest decrement accepted when the line search stalls on rounding
    // noise, as a fraction of the barrier term count m. The centering error
    // then adds about this fraction to the certified gap m / tau.
    double stall_decrement = 1e-2;
};

struct SolveResult
{
    Vector x;
    double objective = 0.0;
    // Certified upper bound on f0(x) - f0*.
    double gap_bound = 0.0;
    // Infinity norm of the Lagrangian gradient at the recovered multipliers.
    double stationarity = 0.0;
    int newton_iterations = 0;
    int barrier_rounds = 0;
};

namespace detail {

inline bool strictly_inside_box(const ConvexProblem& p, const Vector& x)
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) return false;
        if (!(x[i] > p.lower[i]) || !(x[i] < p.upper[i])) return false;
    }
    return true;
}

inline std::size_t count_barrier_terms(const ConvexProblem& p)
{
    std::size_t m = p.constraints.size();
    for (Eigen::Index i = 0; i < p.lower.size(); ++i) {
        if (std::isfinite(p.lower[i])) ++m;
        if (std::isfinite(p.upper[i])) ++m;
    }
    return m;
}

// Barrier function tau f0 - sum log(-g_i) - sum log(box slacks).
// Returns +inf outside the strict interior.
inline double barrier_value(const ConvexProblem& p, const Vector& x, double tau, double* f0_out = nullptr)
{
    if (!strictly_inside_box(p, x)) return std::numeric_limits<double>::infinity();
    double phi = 0.0;
    for (const auto& g : p.constraints) {
        const double gi = g(x, nullptr, nullptr);
        if (!(gi < 0.0) || !std::isfinite(gi)) return std::numeric_limits<double>::infinity();
        phi -= std::log(-gi);
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isfinite(p.lower[i])) phi -= std::log(x[i] - p.lower[i]);
        if (std::isfinite(p.upper[i])) phi -= std::log(p.upper[i] - x[i]);
    }
    const double f0 = p.objective(x, nullptr, nullptr);
    if (!std::isfinite(f0)) return std::numeric_limits<double>::infinity();
    if (f0_out) *f0_out = f0;
    return phi + tau * f0;
}

struct BarrierDerivatives
{
    double value = 0.0;
    double f0 = 0.0;
    Vector grad;
    Matrix hess;
    Vector f0_grad;
    std::vector<double> g_values;
    std::vector<Vector> g_grads;
};

inline void barrier_derivatives(const ConvexProblem& p, const Vector& x, double tau, BarrierDerivatives& out)
{
    const auto n = static_cast<Eigen::Index>(p.dimension);
    Vector g(n);
    Matrix h(n, n);
    out.f0 = p.objective(x, &g, &h);
    out.f0_grad = g;
    out.grad = tau * g;
    out.hess = tau * h;
    out.value = tau * out.f0;
    out.g_values.resize(p.constraints.size());
    out.g_grads.resize(p.constraints.size());
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const double gi = p.constraints[i](x, &g, &h);
        const double s = -gi;
        out.value -= std::log(s);
        out.grad += g / s;
        out.hess += h / s;
        out.hess.noalias() += (g * g.transpose()) / (s * s);
        out.g_values[i] = gi;
        out.g_grads[i] = g;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isfinite(p.lower[i])) {
            const double s = x[i] - p.lower[i];
            out.value -= std::log(s);
            out.grad[i] -= 1.0 / s;
            out.hess(i, i) += 1.0 / (s * s);
        }
        if (std::isfinite(p.upper[i])) {
            const double s = p.upper[i] - x[i];
            out.value -= std::log(s);
            out.grad[i] += 1.0 / s;
            out.hess(i, i) += 1.0 / (s * s);
        }
    }
}

// Newton direction for a symmetric matrix that should be positive definite;
// adds a growing diagonal shift if the factorization says otherwise.
inline Vector newton_direction(const Matrix& hess, const Vector& grad)
{
    // Symmetric Jacobi scaling first: barrier Hessians mix curvatures many
    // orders of magnitude apart, and the scaled system factors accurately.
    const Eigen::Index n = hess.rows();
    Vector scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = hess(i, i);
        scale[i] = h > 0.0 && std::isfinite(h) ? 1.0 / std::sqrt(h) : 1.0;
    }
    const Matrix scaled = scale.asDiagonal() * hess * scale.asDiagonal();
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::LDLT<Matrix> ldlt(scaled + shift * Matrix::Identity(n, n));
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
            Vector d = scale.cwiseProduct(ldlt.solve(Vector(-scale.cwiseProduct(grad))));
            if (d.allFinite()) return d;
        }
        shift = shift == 0.0 ? 1e-12 : shift * 10.0;
    }
    return -grad;
}

} // namespace detail

/*
 * Primal log-barrier interior-point method with damped Newton centering.
 *
 * Every iterate is strictly feasible: box bounds and g_i < 0 hold exactly.
 * The stopping rule certifies f0(x) - f0* <= m / tau, where m counts the
 * inequality and finite box constraints. Deterministic for fixed inputs.
 *
 * Throws InfeasibleStartError if x0 is not strictly feasible and
 * SolverError (carrying the last iterate) when max_newton is exhausted.
 */
inline SolveResult solve_convex(const ConvexProblem& problem, const Vector& x0, const SolverOptions& opts = {})
{
    if (static_cast<std::size_t>(x0.size()) != problem.dimension
        || problem.lower.size() != x0.size() || problem.upper.size() != x0.size())
        throw ValidationError("solve_convex: dimension mismatch");

    const auto as_std = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };

    if (!std::isfinite(detail::barrier_value(problem, x0, 1.0)))
        throw InfeasibleStartError("solve_convex: starting point is not strictly feasible", as_std(x0));

    const double m = static_cast<double>(std::max<std::size_t>(detail::count_barrier_terms(problem), 1));
    Vector x = x0;
    const double f_start = problem.objective(x, nullptr, nullptr);
    const double gap0 = opts.initial_gap > 0.0 ? opts.initial_gap
                                               : std::max(std::abs(f_start), problem.objective_scale);
    double tau = m / gap0;

    SolveResult res;
    detail::BarrierDerivatives d;
    constexpr double armijo = 0.25;

    while (true) {
        ++res.barrier_rounds;
        // Centering. A round ends when the Newton decrement is below
        // centering_tol, or when no step can reduce the barrier beyond its
        // rounding noise while the decrement is already small.
        bool centered = false;
        double last_decrement = 0.0;
        int full_steps = 0;
        for (int centering = 0; centering < opts.max_centering; ++centering) {
            if (res.newton_iterations >= opts.max_newton)
                throw SolverError("solve_convex: Newton iteration limit reached", as_std(x));
            detail::barrier_derivatives(problem, x, tau, d);
            const Vector dx = detail::newton_direction(d.hess, d.grad);
            const double slope = d.grad.dot(dx);
            ++res.newton_iterations;
            last_decrement = -0.5 * slope;
            if (!(slope < 0.0) || last_decrement <= opts.centering_tol) {
                centered = true;
                break;
            }
            // Below the rounding level of phi the line search cannot see
            // progress. Such a decrement is deep in the quadratic region, so
            // a few unguarded full steps are safe; after that it is as
            // centered as double precision allows.
            const double round_level = 256.0 * std::numeric_limits<double>::epsilon() * std::abs(d.value);
            const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(d.value);
            if (last_decrement <= round_level) {
                if (full_steps < 4) {
                    const Vector trial = x + dx;
                    if (const double phi = detail::barrier_value(problem, trial, tau);
                        std::isfinite(phi) && phi <= d.value + noise) {
                        x = trial;
                        ++full_steps;
                        continue;
                    }
                }
                centered = true;
                break;
            }

            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Vector trial = x + step * dx;
                if (trial == x) break;
                const double phi = detail::barrier_value(problem, trial, tau);
                // Decreases below the rounding noise of phi do not count as progress.
                if (std::isfinite(phi) && phi <= d.value + armijo * step * slope && phi < d.value - noise) {
                    x = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                centered = last_decrement <= opts.stall_decrement * m;
                break;
            }
        }
        if (!centered)
        {
            char msg[96];
            std::snprintf(msg, sizeof msg, "solve_convex: centering failed (decrement %.3g, round %d)",
                          last_decrement, res.barrier_rounds);
            throw SolverError(msg, as_std(x));
        }

        const double f0 = problem.objective(x, nullptr, nullptr);
        const double gap = m / tau;
        if (gap <= opts.tol * std::max(std::abs(f0), problem.objective_scale)) {
            detail::barrier_derivatives(problem, x, tau, d);
            Vector lag = d.f0_grad;
            for (std::size_t i = 0; i < d.g_values.size(); ++i)
                lag += d.g_grads[i] / (tau * -d.g_values[i]);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (std::isfinite(problem.lower[i])) lag[i] -= 1.0 / (tau * (x[i] - problem.lower[i]));
                if (std::isfinite(problem.upper[i])) lag[i] += 1.0 / (tau * (problem.upper[i] - x[i]));
            }
            res.x = x;
            res.objective = f0;
            res.gap_bound = gap;
            res.stationarity = lag.cwiseAbs().maxCoeff();
            return res;
        }
        tau *= opts.barrier_growth;
    }
}

// Iteration state of the quadratic-transform loop. With several ratio
// terms each has its own multiplier.
struct FractionalState
{
    std::vector<double> t;
    int q = 0;
    std::vector<double> objective_trace;
};

/*
 * A problem whose only non-convex pieces are ratios A_i(x) / B_i(x) with
 * A_i convex positive and B_i concave positive. convexify(t) must return the
 * convex problem in which each ratio is replaced by
 * t_i A_i^2 + 1 / (4 t_i B_i^2).
 */
struct FractionalProblem
{
    std::function<ConvexProblem(const std::vector<double>& t)> convexify;
    // (A_i(x), B_i(x)) for every ratio term.
    std::function<std::vector<std::pair<double, double>>(const Vector& x)> ratio_parts;
    // Objective with the exact ratios, recorded in the trace.
    std::function<double(const Vector& x)> true_objective;
    // Maps a solver output to the next starting point; must be strictly
    // feasible for the problem convexified at the multipliers matched to x.
    std::function<Vector(const Vector& x)> restart;
};

struct FractionalOptions
{
    double tol_t = 1e-6;
    int max_outer = 100;
    SolverOptions inner;
};

struct FractionalResult
{
    Vector x;
    FractionalState state;
    SolveResult last_solve;
};

inline std::vector<double> matched_multipliers(const FractionalProblem& fp, const Vector& x)
{
    std::vector<double> t;
    for (const auto& [a, b] : fp.ratio_parts(x)) {
        if (!(a > 0.0) || !(b > 0.0))
            throw DomainError("minimize_fractional: ratio numerator and denominator must be > 0");
        t.push_back(matched_multiplier(a, b));
    }
    return t;
}

/*
 * Alternates a convex solve at fixed multipliers with the closed-form
 * update t_i = 1 / (2 A_i(x) B_i(x)) until every multiplier moves by at
 * most tol_t relative. The surrogate majorizes each ratio and is tight at
 * the update point, so the exact objective never increases.
 */
inline FractionalResult minimize_fractional(const FractionalProblem& fp, const Vector& x0,
                                            const FractionalOptions& opts = {})
{
    FractionalResult out;
    Vector x = x0;
    out.state.t = matched_multipliers(fp, x);
    out.state.objective_trace.push_back(fp.true_objective(x));

    for (int q = 1; q <= opts.max_outer; ++q) {
        const ConvexProblem cp = fp.convexify(out.state.t);
        const Vector start = fp.restart ? fp.restart(x) : x;
        out.last_solve = solve_convex(cp, start, opts.inner);
        x = out.last_solve.x;
        const std::vector<double> t_next = matched_multipliers(fp, x);
        double change = 0.0;
        for (std::size_t i = 0; i < t_next.size(); ++i)
            change = std::max(change, std::abs(t_next[i] - out.state.t[i]) / out.state.t[i]);
        out.state.t = t_next;
        out.state.q = q;
        out.state.objective_trace.push_back(fp.true_objective(x));
        if (change <= opts.tol_t) {
            out.x = x;
            return out;
        }
    }
    throw ConvergenceError("minimize_fractional: multipliers did not converge",
                           std::vector<double>(x.data(), x.data() + x.size()));
}

} // namespace fogopt
