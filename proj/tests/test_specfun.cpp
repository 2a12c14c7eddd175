// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ftr/specfun.hpp"
#include "oracles.hpp"

using namespace ftr;

TEST_CASE("log_gamma basics") {
    CHECK(log_gamma(1.0) == 0.0);
    CHECK_THAT(log_gamma(5.0), Catch::Matchers::WithinRel(std::log(24.0), 1e-15));
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-2.5), std::domain_error);
}

TEST_CASE("log_gamma against quadrature oracle") {
    // base point evaluated by quadrature, walked down by the recurrence
    CHECK_THAT(log_gamma(10.5), Catch::Matchers::WithinRel(oracles::log_gamma_quadrature(10.5), 1e-11));
    CHECK_THAT(log_gamma(3.25), Catch::Matchers::WithinRel(oracles::log_gamma_quadrature(3.25), 1e-11));
}

TEST_CASE("log_gamma recurrence property") {
    for (double x = 0.1; x < 50.0; x += 0.31) {
        const double r = log_gamma(x + 1.0) - log_gamma(x) - std::log(x);
        CHECK(std::fabs(r) <= 1e-12 * std::max(1.0, std::fabs(log_gamma(x))));
    }
}

TEST_CASE("lower_regularized_gamma") {
    SECTION("shape 1 is the exponential CDF") {
        for (double x : {0.0, 0.1, 1.0, 7.5})
            CHECK_THAT(lower_regularized_gamma(1, x), Catch::Matchers::WithinAbs(-std::expm1(-x), 1e-15));
    }
    SECTION("zero at the origin, one at infinity") {
        for (int n : {1, 3, 17}) {
            CHECK(lower_regularized_gamma(n, 0.0) == 0.0);
            CHECK_THAT(lower_regularized_gamma(n, 1e4), Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("quadrature oracle at shape 4, x 3.7") {
        CHECK_THAT(lower_regularized_gamma(4, 3.7),
                   Catch::Matchers::WithinRel(oracles::gamma_p_quadrature(4, 3.7), 1e-10));
    }
    SECTION("monotone in x") {
        double prev = -1.0;
        for (double x = 0.0; x < 30.0; x += 0.25) {
            const double p = lower_regularized_gamma(6, x);
            CHECK(p >= prev);
            prev = p;
        }
    }
    SECTION("complementarity with the upper tail") {
        for (int n : {1, 2, 5, 12, 40})
            for (double x : {0.05, 0.8, 3.0, 17.5, 60.0})
                CHECK_THAT(lower_regularized_gamma(n, x) + regularized_gamma_q(n, x),
                           Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    CHECK_THROWS_AS(lower_regularized_gamma(0, 1.0), std::domain_error);
    CHECK_THROWS_AS(lower_regularized_gamma(3, -0.1), std::domain_error);
}

TEST_CASE("upper incomplete gamma, non-positive order") {
    SECTION("E1(1) by quadrature") {
        const double e1 = integrate_to_inf([](double t) { return std::exp(-t) / t; }, 1.0, 1e-13);
        CHECK_THAT(upper_incomplete_gamma_nonpos(0, 1.0), Catch::Matchers::WithinRel(e1, 1e-12));
        CHECK_THAT(upper_incomplete_gamma_nonpos(0, 1.0), Catch::Matchers::WithinRel(0.21938393439552026, 1e-10));
    }
    SECTION("one recurrence step is the definition") {
        // Gamma(s-1,x) = (Gamma(s,x) - x^{s-1} e^{-x}) / (s-1) at s = 0
        const double g0 = upper_incomplete_gamma_nonpos(0, 2.0);
        const double g1 = upper_incomplete_gamma_nonpos(-1, 2.0);
        CHECK_THAT(g1, Catch::Matchers::WithinRel(std::exp(-2.0) / 2.0 - g0, 1e-12));
    }
    SECTION("deep order against the log-scaled quadrature oracle") {
        const auto got = upper_incomplete_gamma_nonpos_log(-40, 0.04);
        CHECK(got.sign == 1);
        CHECK_THAT(got.log_magnitude,
                   Catch::Matchers::WithinAbs(oracles::log_upper_gamma_nonpos_quadrature(40, 0.04), 1e-8));
    }
    SECTION("relative accuracy across the contract range") {
        for (int k : {0, 3, 17, 60})
            for (double x : {1e-3, 0.3, 2.0, 45.0, 1e3}) {
                const auto got = upper_incomplete_gamma_nonpos_log(-k, x);
                const double ref = oracles::log_upper_gamma_nonpos_quadrature(k, x);
                CHECK_THAT(got.log_magnitude, Catch::Matchers::WithinAbs(ref, 1e-9));
            }
    }
    CHECK_THROWS_AS(upper_incomplete_gamma_nonpos(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(upper_incomplete_gamma_nonpos(1, 1.0), std::domain_error);
}

TEST_CASE("scaled exponential integral") {
    // e^x E_1(x) spot values against quadrature
    for (double x : {0.2, 1.0, 8.0, 120.0, 2000.0}) {
        const double ref = integrate_to_inf([&](double t) { return std::exp(-(t - x)) / t; }, x, 1e-12);
        CHECK_THAT(scaled_expint_en(1, x), Catch::Matchers::WithinRel(ref, 1e-10));
    }
}

TEST_CASE("gauss_2f1") {
    SECTION("leading term") {
        CHECK(gauss_2f1(1.3, 2.7, 0.9, 0.0).value == 1.0);
    }
    SECTION("binomial collapse b == c") {
        for (double z : {0.1, 0.5, 0.93})
            CHECK_THAT(gauss_2f1(2.5, 7.0, 7.0, z).value,
                       Catch::Matchers::WithinRel(std::pow(1.0 - z, -2.5), 1e-13));
    }
    SECTION("extended-precision brute force at (1, 11.5, 12, 0.6)") {
        const double ref = static_cast<double>(oracles::f21_brute(1.0L, 11.5L, 12.0L, 0.6L));
        CHECK_THAT(gauss_2f1(1.0, 11.5, 12.0, 0.6).value, Catch::Matchers::WithinRel(ref, 1e-10));
    }
    SECTION("transformed region stays accurate") {
        for (double z : {0.8, 0.9, 0.97}) {
            const double ref = static_cast<double>(oracles::f21_brute(1.0L, 41.5L, 42.0L, (long double)z, 400000));
            CHECK_THAT(gauss_2f1(1.0, 41.5, 42.0, z).value, Catch::Matchers::WithinRel(ref, 1e-10));
        }
    }
    SECTION("contiguous relation on random draws") {
        std::mt19937 gen(42);
        std::uniform_real_distribution<double> ua(0.5, 4.0), ub(0.5, 20.0), uz(0.0, 0.9);
        for (int i = 0; i < 40; ++i) {
            const double a = ua(gen), b = ub(gen), z = uz(gen);
            const double c = b + ua(gen) + 0.3;
            const double f0 = gauss_2f1(a, b, c, z).value;
            const double fp = gauss_2f1(a + 1.0, b, c, z).value;
            const double fm = gauss_2f1(a - 1.0, b, c, z).value;
            const double resid = (c - 2.0 * a - (b - a) * z) * f0 + a * (1.0 - z) * fp - (c - a) * fm;
            CHECK(std::fabs(resid) <= 1e-9 * (std::fabs(f0) + std::fabs(fp) + std::fabs(fm)));
        }
    }
    CHECK_THROWS_AS(gauss_2f1(1.0, 2.0, 3.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gauss_2f1(1.0, 2.0, -1.0, 0.5), std::domain_error);
}

TEST_CASE("bessel_i") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(4, 0.0) == 0.0);
    SECTION("parity and order negation, exactly") {
        for (int n : {0, 1, 2, 3, 5, 8})
            for (double x : {0.4, 2.0, 7.5, 41.0}) {
                CHECK(bessel_i(n, -x) == ((n % 2) ? -bessel_i(n, x) : bessel_i(n, x)));
                CHECK(bessel_i(-n, x) == bessel_i(n, x));
            }
    }
    SECTION("integral-representation oracle") {
        for (int n : {0, 2, 5})
            for (double x : {0.7, 7.5, 30.0})
                CHECK_THAT(bessel_i(n, x), Catch::Matchers::WithinRel(oracles::bessel_i_integral(n, x), 1e-10));
    }
    CHECK_THROWS_AS(bessel_i(0, 800.0), std::range_error);
}

TEST_CASE("associated Legendre on [1, inf)") {
    SECTION("values at the left endpoint") {
        CHECK(assoc_legendre_p(2.7, 0, 1.0) == 1.0);
        CHECK(assoc_legendre_p(2.7, -2, 1.0) == 0.0);
        CHECK_THROWS_AS(assoc_legendre_p(2.7, 1, 1.0), std::domain_error);
    }
    SECTION("P_1 is the identity") {
        for (double x : {1.0, 1.2, 3.0, 20.0})
            CHECK_THAT(assoc_legendre_p(1.0, 0, x), Catch::Matchers::WithinRel(x, 1e-14));
    }
    SECTION("order zero against the Laplace integral") {
        for (double nu : {0.9, 2.3, 9.5})
            for (double x : {1.05, 1.6, 5.5})
                CHECK_THAT(assoc_legendre_p(nu, 0, x),
                           Catch::Matchers::WithinRel(oracles::legendre_p0_laplace(nu, x), 1e-10));
    }
    SECTION("negative order against the untransformed extended-precision series") {
        const double ref = static_cast<double>(oracles::legendre_neg_untransformed(2.3L, 1, 1.25L));
        CHECK_THAT(assoc_legendre_p(2.3, -1, 1.25), Catch::Matchers::WithinRel(ref, 1e-11));
        for (int s : {0, 2, 7})
            for (double nu : {1.7, 14.5})
                for (double x : {1.1, 2.4}) {
                    const double r = static_cast<double>(
                        oracles::legendre_neg_untransformed((long double)nu, s, (long double)x));
                    CHECK_THAT(assoc_legendre_p(nu, -s, x), Catch::Matchers::WithinRel(r, 1e-10));
                }
    }
    SECTION("degree recurrence property") {
        std::mt19937 gen(11);
        std::uniform_real_distribution<double> unu(0.2, 24.0), ux(1.001, 10.0);
        std::uniform_int_distribution<int> umu(-6, 6);
        for (int i = 0; i < 60; ++i) {
            const double nu = unu(gen), x = ux(gen);
            const int mu = umu(gen);
            if (nu - 1.0 <= -1.0) continue;
            const auto p0 = assoc_legendre_p_log(nu - 1.0, mu, x);
            const auto p1 = assoc_legendre_p_log(nu, mu, x);
            const auto p2 = assoc_legendre_p_log(nu + 1.0, mu, x);
            const double lhs = (nu - mu + 1.0) * p2.value();
            const double rhs = (2.0 * nu + 1.0) * x * p1.value() - (nu + mu) * p0.value();
            const double scale = std::fabs(lhs) + std::fabs(rhs) + 1e-280;
            CHECK(std::fabs(lhs - rhs) <= 1e-9 * scale);
        }
    }
    SECTION("continuity on (1, inf)") {
        for (double x : {1.0001, 1.01, 2.0, 9.0}) {
            const double step = x * 1e-9;
            const double a = assoc_legendre_p(3.3, -2, x);
            const double b = assoc_legendre_p(3.3, -2, x + step);
            // slope near the endpoint is ~ s/(x-1) in log scale
            const double slope_bound = step * (8.0 / (x - 1.0) + 8.0);
            CHECK(std::fabs(a - b) <= std::fabs(a) * (slope_bound + 1e-12));
        }
    }
    CHECK_THROWS_AS(assoc_legendre_p(-1.0, 0, 2.0), std::domain_error);
    CHECK_THROWS_AS(assoc_legendre_p(2.0, 0, 0.5), std::domain_error);
}

TEST_CASE("LogSigned round trip") {
    for (double v : {3.7e-200, 1.0, -2.5, 8.1e250, -4.2e-120}) {
        const auto ls = LogSigned::from_value(v);
        const auto ls2 = LogSigned::from_value(ls.value());
        CHECK(ls2.sign == ls.sign);
        CHECK_THAT(ls2.log_magnitude, Catch::Matchers::WithinAbs(ls.log_magnitude, 1e-13));
    }
    CHECK(LogSigned::from_value(0.0).sign == 0);
    CHECK(LogSigned::zero().value() == 0.0);
}
