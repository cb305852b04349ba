#pragma once
#include <array>
#include <cmath>
#include <cstddef>

namespace fogopt {

/*
 * Second-order forward-mode automatic differentiation over N independent
 * variables. A Jet carries the value, the gradient and the (symmetric)
 * Hessian of an expression. Used to obtain exact derivatives of the small
 * per-device objective and constraint functions handed to the barrier solver.
 */
template <std::size_t N>
struct Jet
{
    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, N * N> h{};

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: implicit constants are the point

    static Jet variable(double value, std::size_t index)
    {
        Jet j(value);
        j.g[index] = 1.0;
        return j;
    }

    double hess(std::size_t i, std::size_t j) const { return h[i * N + j]; }
};

namespace detail {

// Chain rule for a scalar function with derivatives d1 = phi'(a), d2 = phi''(a).
template <std::size_t N>
inline Jet<N> chain(const Jet<N>& a, double value, double d1, double d2)
{
    Jet<N> r(value);
    for (std::size_t i = 0; i < N; ++i) r.g[i] = d1 * a.g[i];
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            r.h[i * N + j] = d1 * a.h[i * N + j] + d2 * a.g[i] * a.g[j];
    return r;
}

} // namespace detail

template <std::size_t N>
inline Jet<N> operator+(const Jet<N>& a, const Jet<N>& b)
{
    Jet<N> r(a.v + b.v);
    for (std::size_t i = 0; i < N; ++i) r.g[i] = a.g[i] + b.g[i];
    for (std::size_t i = 0; i < N * N; ++i) r.h[i] = a.h[i] + b.h[i];
    return r;
}

template <std::size_t N>
inline Jet<N> operator-(const Jet<N>& a)
{
    Jet<N> r(-a.v);
    for (std::size_t i = 0; i < N; ++i) r.g[i] = -a.g[i];
    for (std::size_t i = 0; i < N * N; ++i) r.h[i] = -a.h[i];
    return r;
}

template <std::size_t N>
inline Jet<N> operator-(const Jet<N>& a, const Jet<N>& b) { return a + (-b); }

template <std::size_t N>
inline Jet<N> operator*(const Jet<N>& a, const Jet<N>& b)
{
    Jet<N> r(a.v * b.v);
    for (std::size_t i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            r.h[i * N + j] = a.h[i * N + j] * b.v + a.v * b.h[i * N + j]
                           + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
}

template <std::size_t N>
inline Jet<N> operator*(const Jet<N>& a, double s)
{
    Jet<N> r(a.v * s);
    for (std::size_t i = 0; i < N; ++i) r.g[i] = a.g[i] * s;
    for (std::size_t i = 0; i < N * N; ++i) r.h[i] = a.h[i] * s;
    return r;
}

template <std::size_t N>
inline Jet<N> operator*(double s, const Jet<N>& a) { return a * s; }

template <std::size_t N>
inline Jet<N> inverse(const Jet<N>& a)
{
    const double iv = 1.0 / a.v;
    return detail::chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <std::size_t N>
inline Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * inverse(b); }

template <std::size_t N>
inline Jet<N> operator/(const Jet<N>& a, double s) { return a * (1.0 / s); }

template <std::size_t N>
inline Jet<N> operator/(double s, const Jet<N>& a) { return s * inverse(a); }

template <std::size_t N>
inline Jet<N> operator+(const Jet<N>& a, double s) { Jet<N> r = a; r.v += s; return r; }

template <std::size_t N>
inline Jet<N> operator+(double s, const Jet<N>& a) { return a + s; }

template <std::size_t N>
inline Jet<N> operator-(const Jet<N>& a, double s) { return a + (-s); }

template <std::size_t N>
inline Jet<N> operator-(double s, const Jet<N>& a) { return (-a) + s; }

template <std::size_t N>
inline Jet<N> log(const Jet<N>& a)
{
    const double iv = 1.0 / a.v;
    return detail::chain(a, std::log(a.v), iv, -iv * iv);
}

template <std::size_t N>
inline Jet<N> log1p(const Jet<N>& a)
{
    const double iv = 1.0 / (1.0 + a.v);
    return detail::chain(a, std::log1p(a.v), iv, -iv * iv);
}

template <std::size_t N>
inline Jet<N> exp(const Jet<N>& a)
{
    const double e = std::exp(a.v);
    return detail::chain(a, e, e, e);
}

template <std::size_t N>
inline Jet<N> sqrt(const Jet<N>& a)
{
    const double s = std::sqrt(a.v);
    return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <std::size_t N>
inline Jet<N> square(const Jet<N>& a) { return a * a; }

inline double square(double a) { return a * a; }

template <std::size_t N>
inline double value_of(const Jet<N>& a) { return a.v; }

inline double value_of(double a) { return a; }

} // namespace fogopt
