// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles: independent routes (quadrature, extended-precision
// series, integral representations) used to pin expected values. Nothing here
// may call the implementation path it is checking.
#pragma once

#include <cmath>
#include <vector>

#include "ftr/quadrature.hpp"

namespace oracles {

/// 2F1 by direct long double summation, no transformations.
inline long double f21_brute(long double a, long double b, long double c, long double z,
                             long n_terms = 50000) {
    long double term = 1.0L, sum = 1.0L;
    for (long n = 0; n < n_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0L)) * z;
        sum += term;
    }
    return sum;
}

/// Legendre P^{-s}_nu(z) by the untransformed hypergeometric representation
///   ((z+1)/(z-1))^{-s/2} 2F1(-nu, nu+1; 1+s; (1-z)/2) / s!
/// in long double; converges for z < 3 only, which is fine for an oracle.
inline long double legendre_neg_untransformed(long double nu, int s, long double z,
                                              long n_terms = 200000) {
    const long double w = (1.0L - z) / 2.0L;
    long double term = 1.0L, sum = 1.0L;
    for (long n = 0; n < n_terms; ++n) {
        term *= (-nu + n) * (nu + 1.0L + n) / ((1.0L + s + n) * (n + 1.0L)) * w;
        sum += term;
        if (std::fabs((double)term) < 1e-22 * std::fabs((double)sum) && n > 8) break;
    }
    long double pref = std::pow((z + 1.0L) / (z - 1.0L), -0.5L * s);
    for (int i = 1; i <= s; ++i) pref /= i;
    return pref * sum;
}

/// Order-zero Legendre by the Laplace integral P_nu(z) = (1/pi) int_0^pi (z + sqrt(z^2-1) cos t)^nu dt.
inline double legendre_p0_laplace(double nu, double z) {
    const double r = std::sqrt(z * z - 1.0);
    return ftr::integrate([&](double t) { return std::pow(z + r * std::cos(t), nu); }, 0.0, M_PI,
                          1e-12) / M_PI;
}

/// Modified Bessel by the integral representation I_n(x) = (1/pi) int_0^pi e^{x cos t} cos(n t) dt.
inline double bessel_i_integral(int n, double x) {
    return ftr::integrate([&](double t) { return std::exp(x * std::cos(t)) * std::cos(n * t); }, 0.0,
                          M_PI, 1e-12) / M_PI;
}

/// Gamma function by direct quadrature at a large base point plus downward
/// recurrence: ln Gamma(x) = ln Gamma(x + n) - sum ln(x + i).
inline double log_gamma_quadrature(double x) {
    const int n = static_cast<int>(std::ceil(30.0 - x));
    const double base = x + std::max(0, n);
    const double g = ftr::integrate([&](double t) { return std::pow(t, base - 1.0) * std::exp(-t); },
                                    0.0, base + 60.0 * std::sqrt(base), 1e-13);
    double lg = std::log(g);
    for (int i = 0; i < std::max(0, n); ++i) lg -= std::log(x + i);
    return lg;
}

/// Regularized lower incomplete gamma for integer shape by quadrature.
inline double gamma_p_quadrature(int shape, double x) {
    const double g = ftr::integrate(
        [&](double t) { return std::pow(t, shape - 1.0) * std::exp(-t); }, 0.0, x, 1e-12);
    return g / std::tgamma(static_cast<double>(shape));
}

/// log Gamma(-k, x) by quadrature of the scaled substitution t = x(1 + w):
///   Gamma(-k, x) = x^{-k} e^{-x} int_0^inf (1+w)^{-k-1} e^{-x w} dw.
inline double log_upper_gamma_nonpos_quadrature(int k, double x) {
    const double scaled = ftr::integrate_to_inf(
        [&](double w) { return std::pow(1.0 + w, -(k + 1.0)) * std::exp(-x * w); }, 0.0, 1e-12);
    return -k * std::log(x) - x + std::log(scaled);
}

}  // namespace oracles
