#pragma once

// Adaptive Simpson quadrature plus helpers for improper integrals over
// half-infinite tails (truncation doubling with a relative Cauchy check).

#include <cmath>
#include <functional>
#include <limits>

#include "longrun/errors.hpp"

namespace longrun {

namespace quad_detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw QuadratureFailure("adaptive simpson: max depth reached");
    if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b)))
        return left + right + delta / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace quad_detail

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(std::forward<F>(f), b, a, tol, max_depth);
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw QuadratureFailure("integrate: non-finite integrand");
    const double whole = quad_detail::simpson(a, b, fa, fm, fb);
    const double scale = std::max(1.0, std::abs(whole));
    return quad_detail::adaptive(f, a, b, fa, fm, fb, whole, tol * scale, max_depth);
}

// Integral over [a, +inf): truncations a + L, a + 2L, ... until two successive
// values agree in relative terms.  Intended for integrands with (at least)
// exponential tail decay.
template <class F>
double integrate_to_upper_infinity(F&& f, double a, double initial_width, double rel_tol = 1e-10,
                                   int max_doublings = 40) {
    double hi = a + initial_width;
    double total = integrate(f, a, hi, rel_tol);
    for (int i = 0; i < max_doublings; ++i) {
        const double next_hi = a + (hi - a) * 2.0;
        const double extra = integrate(f, hi, next_hi, rel_tol);
        total += extra;
        hi = next_hi;
        if (std::abs(extra) <= rel_tol * std::max(1e-300, std::abs(total))) return total;
    }
    throw QuadratureFailure("integrate_to_upper_infinity: tail did not converge");
}

template <class F>
double integrate_to_lower_infinity(F&& f, double b, double initial_width, double rel_tol = 1e-10,
                                   int max_doublings = 40) {
    return integrate_to_upper_infinity([&](double t) { return f(2.0 * b - t); }, b, initial_width,
                                       rel_tol, max_doublings);
}

}  // namespace longrun
