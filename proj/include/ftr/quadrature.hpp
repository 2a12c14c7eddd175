// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Gauss-Kronrod quadrature. Serves the embedded selftest and the
// oracle cross-checks; nothing on the closed-form evaluation path calls it.
#pragma once

#include <cmath>
#include <stdexcept>

#include "ftr/errors.hpp"

namespace ftr {

namespace detail {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1,1].
inline constexpr double kKronrodX[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kKronrodW[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kGaussW[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct GkEstimate {
    double integral;
    double error;  // |K15 - G7|, a conservative bound
};

template <typename F>
GkEstimate gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(mid + h * kKronrodX[i]);
        k += kKronrodW[i] * v;
        if (i % 2 == 1) g += kGaussW[i / 2] * v;
    }
    k *= h;
    g *= h;
    return {k, std::fabs(k - g)};
}

struct QuadBudget {
    long intervals = 0;
    long cap = 2000000;
};

template <typename F>
double gk_adaptive(const F& f, double a, double b, double abs_tol, double rel_tol, int depth,
                   QuadBudget& budget) {
    if (++budget.intervals > budget.cap)
        throw convergence_error("integrate", 0.0, 0.0, budget.cap);
    const auto whole = gk15(f, a, b);
    if (whole.error <= abs_tol || whole.error <= rel_tol * std::fabs(whole.integral) || depth <= 0)
        return whole.integral;
    const double mid = 0.5 * (a + b);
    return gk_adaptive(f, a, mid, abs_tol * 0.5, rel_tol, depth - 1, budget) +
           gk_adaptive(f, mid, b, abs_tol * 0.5, rel_tol, depth - 1, budget);
}

}  // namespace detail

/// Adaptive quadrature of f over the finite interval [a, b]. The absolute
/// budget is set from a first whole-interval pass, so integrands of any
/// magnitude terminate.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0) {
    if (!(b >= a)) throw std::domain_error("integrate: requires b >= a");
    if (a == b) return 0.0;
    // coarse magnitude scan to anchor the absolute tolerance
    double scale = 0.0;
    for (int i = 0; i <= 32; ++i) {
        const double x = a + (b - a) * i / 32.0;
        const double v = std::fabs(f(x));
        if (std::isfinite(v)) scale = std::max(scale, v);
    }
    const double anchor = std::max(abs_tol, scale * (b - a) * rel_tol * 0.1 + 1e-300);
    detail::QuadBudget budget;
    return detail::gk_adaptive(f, a, b, anchor, rel_tol, 40, budget);
}

/// Adaptive quadrature of f over [a, inf) via the substitution x = a + t/(1-t).
template <typename F>
double integrate_to_inf(const F& f, double a, double rel_tol = 1e-10, double abs_tol = 0.0) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        const double x = a + t / om;
        const double v = f(x) / (om * om);
        return std::isfinite(v) ? v : 0.0;
    };
    // split at the image of the unit scale to keep the peak resolved
    return integrate(g, 0.0, 0.5, rel_tol, abs_tol) + integrate(g, 0.5, 1.0 - 1e-14, rel_tol, abs_tol);
}

}  // namespace ftr
