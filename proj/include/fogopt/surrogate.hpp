#pragma once
#include "fogopt/errors.hpp"
#include "fogopt/jet.hpp"

namespace fogopt {

// Quadratic-transform majorizer of a / b:  t a^2 + 1 / (4 t b^2).
// It is >= a / b for every t > 0 and equal at t = 1 / (2 a b).
template <class S>
inline S surrogate_ratio_expr(const S& a, const S& b, double t)
{
    return t * square(a) + 1.0 / (4.0 * t * square(b));
}

inline double surrogate_ratio(double a, double b, double t)
{
    if (!(a > 0.0) || !(b > 0.0) || !(t > 0.0))
        throw DomainError("surrogate_ratio: a, b and t must all be > 0");
    return surrogate_ratio_expr(a, b, t);
}

// Multiplier at which the surrogate touches a / b.
inline double matched_multiplier(double a, double b) { return 1.0 / (2.0 * a * b); }

} // namespace fogopt
