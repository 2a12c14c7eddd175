// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <tuple>

#include "ftr/ftr_dist.hpp"
#include "ftr/quadrature.hpp"
#include "oracles.hpp"

using namespace ftr;

namespace {

/// s_{k,l} of the Appendix chain: int_0^inf u^{j+m-1} e^{-(m+K)u} I_{2l-k}(-u K Delta) du,
/// by quadrature with the Bessel parity identity applied for a stable integrand.
double sk_quadrature(int j, const FtrParams& p, int l, int k) {
    const int n = std::abs(2 * l - k);
    const int sgn = (k % 2) ? -1 : 1;  // I_n(-y) = (-1)^n I_n(y), parity of 2l-k equals parity of k
    const double rate = p.m + p.k;
    const double hi = (j + p.m + 60.0) / rate * 4.0;
    const double val = integrate(
        [&](double u) {
            if (u <= 0.0) return 0.0;
            return std::exp((j + p.m - 1.0) * std::log(u) - rate * u) * bessel_i(n, u * p.k * p.delta);
        },
        0.0, hi, 1e-13);
    return sgn * val;
}

/// d_j assembled from quadrature values with the binomial weights of the sum.
double dj_oracle(int j, const FtrParams& p) {
    long double tot = 0.0L;
    for (int k = 0; k <= j; ++k) {
        if (p.delta == 0.0 && k > 0) break;
        const double lk = std::lgamma(j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(j - k + 1.0) +
                          (k > 0 ? k * std::log(p.delta / 2.0) : 0.0);
        for (int l = 0; l <= k; ++l) {
            const double ll = std::lgamma(k + 1.0) - std::lgamma(l + 1.0) - std::lgamma(k - l + 1.0);
            tot += std::exp(lk + ll) * static_cast<long double>(sk_quadrature(j, p, l, k));
        }
    }
    return static_cast<double>(tot);
}

}  // namespace

TEST_CASE("FtrParams validation and derived diffuse power") {
    CHECK_THROWS_AS((FtrParams{0.0, 1.0, 0.5, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((FtrParams{1.0, -1.0, 0.5, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((FtrParams{1.0, 1.0, 1.5, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((FtrParams{1.0, 1.0, 0.5, 0.0}.validate()), std::domain_error);
    CHECK(FtrParams{1.0, 3.0, 0.5, 8.0}.two_sigma_sq() == 2.0);
}

TEST_CASE("dj_coefficient closed forms") {
    SECTION("delta = 0 collapses to Gamma(m) (m+K)^-m at j = 0") {
        for (double m : {0.7, 1.0, 9.2})
            for (double k : {0.0, 2.0, 15.0}) {
                const double want = std::lgamma(m) - m * std::log(m + k);
                const auto got = dj_coefficient(0, {m, k, 0.0, 1.0});
                CHECK(got.sign == 1);
                CHECK_THAT(got.log_magnitude, Catch::Matchers::WithinAbs(want, 1e-13));
            }
    }
    SECTION("m = 1, K = 0 gives exactly 1") {
        const auto got = dj_coefficient(0, {1.0, 0.0, 0.0, 1.0});
        CHECK(got.sign == 1);
        CHECK_THAT(got.log_magnitude, Catch::Matchers::WithinAbs(0.0, 1e-14));
    }
}

TEST_CASE("dj_coefficient against the s_k integral oracle, j = 0..39") {
    const FtrParams p{10.0, 10.0, 0.5, 1.0};
    for (int j = 0; j < 40; j += (j < 8 ? 1 : 3)) {
        const double got = dj_coefficient(j, p).value();
        const double want = dj_oracle(j, p);
        // both routes share the binomial cancellation; the achievable agreement
        // scales with the cancellation factor of the assembly
        const double tol = std::max(1e-9, 5e-13 * dj_cancellation(j, p));
        INFO("j=" << j << " cancel=" << dj_cancellation(j, p));
        CHECK_THAT(got, Catch::Matchers::WithinRel(want, tol));
    }
}

TEST_CASE("dj_coefficient oracle at a second parameter set with delta = 1") {
    const FtrParams p{1.9, 4.0, 1.0, 1.0};
    for (int j : {0, 1, 2, 3, 5, 9, 14}) {
        const double got = dj_coefficient(j, p).value();
        const double want = dj_oracle(j, p);
        const double tol = std::max(1e-9, 5e-13 * dj_cancellation(j, p));
        CHECK_THAT(got, Catch::Matchers::WithinRel(want, tol));
    }
}

TEST_CASE("dj imaginary residue") {
    SECTION("correct branch keeps every residue under 1e-10") {
        for (double m : {0.5, 9.2, 25.5})
            for (double k : {1.0, 30.0})
                for (double d : {0.35, 1.0})
                    for (int j : {1, 7, 25, 40})
                        CHECK(dj_imag_residue(j, {m, k, d, 1.0}) <= 1e-10);
    }
    SECTION("the real-axis branch reading trips the residue check") {
        CHECK(dj_imag_residue(20, {0.5, 15.0, 0.9, 1.0}, LegendreBranch::kRealAxis) > 1e-10);
        CHECK_THROWS_AS(dj_coefficient(20, {0.5, 15.0, 0.9, 1.0}, LegendreBranch::kRealAxis),
                        consistency_error);
    }
}

TEST_CASE("build_coefficients") {
    SECTION("K = 0 table is the single unit coefficient") {
        const auto t = build_coefficients({2.5, 0.0, 0.7, 3.0});
        REQUIRE(t.terms.size() == 1);
        CHECK(t.terms[0].value() == 1.0);
        CHECK(t.converged);
        CHECK(t.truncation_error_bound == 0.0);
    }
    SECTION("coefficients sum to one") {
        const auto t = build_coefficients({1.5, 15.0, 0.5, 1.0}, {2048, 1e-12, 3});
        CHECK(t.converged);
        CHECK_THAT(t.coefficient_sum, Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
    SECTION("table agrees with the folded dj route (dual evaluation)") {
        const FtrParams p{5.5, 15.0, 0.4, 1.0};
        const auto t = build_coefficients(p, {2048, 1e-12, 3});
        const double lpref = p.m * std::log(p.m) - std::lgamma(p.m);
        for (int j : {0, 1, 4, 11, 23, 39}) {
            const auto dj = dj_coefficient(j, p);
            const double folded = dj.sign * std::exp(lpref + j * std::log(p.k) -
                                                     std::lgamma(j + 1.0) + dj.log_magnitude);
            const double tol = std::max(1e-10, 5e-14 * dj_cancellation(j, p));
            CHECK_THAT(t.terms[j].value(), Catch::Matchers::WithinRel(folded, tol));
        }
    }
    SECTION("default budget reports honest truncation state per reference row") {
        // The 40-term default converges only the small-K rows; the others
        // carry the truncation warning with the bound reported.
        struct Row { double m, k, d; bool conv_at_40; };
        const Row rows[] = {{5.5, 15, 0.4, false}, {8.5, 5, 0.35, false}, {9.2, 3, 1.0, true},
                            {10, 10, 0.5, false},  {15, 20, 0.2, false},  {20, 5, 0.43, true}};
        for (const auto& r : rows) {
            const auto t = build_coefficients({r.m, r.k, r.d, 1.0});
            CHECK(t.converged == r.conv_at_40);
            if (!t.converged) CHECK(t.truncation_error_bound > 1e-9);
            CHECK(t.terms_used() <= 41);
        }
    }
    SECTION("every reference row converges under the validation budget") {
        for (auto [m, k, d] : {std::tuple{5.5, 15.0, 0.4}, {8.5, 5.0, 0.35}, {9.2, 3.0, 1.0},
                               {10.0, 10.0, 0.5}, {15.0, 20.0, 0.2}, {20.0, 5.0, 0.43}}) {
            const auto t = build_coefficients({m, k, d, 1.0}, {2048, 1e-9, 3});
            CHECK(t.converged);
            CHECK(t.truncation_error_bound < 1e-9);
            CHECK_THAT(t.coefficient_sum, Catch::Matchers::WithinAbs(1.0, 1e-7));
        }
    }
}

TEST_CASE("ftr_pdf") {
    SECTION("Rayleigh reduction at the origin") {
        const auto t = build_coefficients({1.0, 0.0, 0.0, 1.0});
        CHECK_THAT(ftr_pdf(0.0, t), Catch::Matchers::WithinRel(1.0, 1e-14));
        for (double x : {0.3, 1.0, 4.0})
            CHECK_THAT(ftr_pdf(x, t), Catch::Matchers::WithinRel(std::exp(-x), 1e-13));
    }
    SECTION("unit mass under quadrature") {
        const auto t = build_coefficients({1.5, 15.0, 0.5, 1.0}, {2048, 1e-12, 3});
        const double integral =
            integrate([&](double x) { return ftr_pdf(x, t); }, 0.0, 50.0, 1e-9) +
            integrate_to_inf([&](double x) { return ftr_pdf(x, t); }, 50.0, 1e-9);
        CHECK_THAT(integral, Catch::Matchers::WithinAbs(1.0, 1e-6));
    }
    SECTION("pointwise match to the shadowing mixture of the TWDP density") {
        const FtrParams p{1.9, 4.0, 0.6, 1.0};
        const auto t = build_coefficients(p, {1024, 1e-12, 3});
        const SeriesControl octl{512, 1e-13, 3};
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double mixed = integrate(
                [&](double u) {
                    if (u <= 0.0) return 0.0;
                    const double fz = std::exp(p.m * std::log(p.m) + (p.m - 1.0) * std::log(u) -
                                               p.m * u - std::lgamma(p.m));
                    return fz * twdp_pdf(x, u * p.k, p.delta, p.two_sigma_sq(), octl);
                },
                0.0, 1.0 + 14.0 / std::sqrt(p.m), 1e-9);
            CHECK_THAT(ftr_pdf(x, t), Catch::Matchers::WithinRel(mixed, 1e-6));
        }
    }
    CHECK_THROWS_AS(ftr_pdf(-0.1, build_coefficients({1, 0, 0, 1})), std::domain_error);
}

TEST_CASE("ftr_cdf") {
    SECTION("zero at zero, Rayleigh closed form at K = 0") {
        const auto t = build_coefficients({1.0, 0.0, 0.0, 1.0});
        CHECK(ftr_cdf(0.0, t) == 0.0);
        for (double x : {0.2, 1.0, 3.3, 10.0})
            CHECK_THAT(ftr_cdf(x, t), Catch::Matchers::WithinRel(-std::expm1(-x), 1e-13));
    }
    SECTION("matches the integral of the density on reference rows") {
        for (auto [m, k, d] : {std::tuple{9.2, 3.0, 1.0}, {10.0, 10.0, 0.5}}) {
            const auto t = build_coefficients({m, k, d, 1.0}, {2048, 1e-12, 3});
            for (double x : {0.2, 0.7, 1.5, 3.0}) {
                const double q = integrate([&](double u) { return ftr_pdf(u, t); }, 0.0, x, 1e-10);
                CHECK_THAT(ftr_cdf(x, t), Catch::Matchers::WithinAbs(q, 1e-6));
            }
        }
    }
    SECTION("nondecreasing on a sorted grid") {
        const auto t = build_coefficients({0.5, 30.0, 1.0, 1.0}, {4096, 1e-12, 3});
        double prev = 0.0;
        for (double x = 0.0; x <= 8.0; x += 0.01) {
            const double f = ftr_cdf(x, t);
            CHECK(f >= prev - 1e-12);
            prev = f;
        }
        CHECK(prev <= 1.0);
        CHECK(prev > 0.9);
    }
    SECTION("derivative recovers the density") {
        const auto t = build_coefficients({10.0, 10.0, 0.5, 1.0}, {1024, 1e-12, 3});
        const double h = 1e-4;  // 1e-4 * avg_snr
        for (double x : {0.3, 0.9, 1.8, 3.5}) {
            const double der = (ftr_cdf(x + h, t) - ftr_cdf(x - h, t)) / (2.0 * h);
            CHECK_THAT(der, Catch::Matchers::WithinRel(ftr_pdf(x, t), 1e-4));
        }
    }
}

TEST_CASE("twdp_pdf") {
    SECTION("K = 0 is the exponential density") {
        for (double x : {0.0, 0.4, 2.0})
            CHECK_THAT(twdp_pdf(x, 0.0, 0.5, 1.0), Catch::Matchers::WithinRel(std::exp(-x), 1e-13));
    }
    SECTION("delta = 0 is the Rician mixture with unit t_j") {
        const double kc = 3.0, ts = 0.25;
        for (double x : {0.1, 1.0, 2.5}) {
            double want = 0.0;  // e^{-K} sum K^j/j! f_G
            for (int j = 0; j < 80; ++j)
                want += std::exp(-kc + j * std::log(kc) - std::lgamma(j + 1.0) + j * std::log(x) -
                                 x / ts - std::lgamma(j + 1.0) - (j + 1.0) * std::log(ts));
            CHECK_THAT(twdp_pdf(x, kc, 0.0, ts, {200, 1e-12, 3}), Catch::Matchers::WithinRel(want, 1e-10));
        }
    }
    SECTION("matches the two-phase quadrature of the conditional Rician density") {
        const double kc = 10.0, delta = 0.5, ts = 1.0, x = 1.5;
        const double sig_sq = ts / 2.0;
        const double base = std::sqrt(sig_sq * kc / 2.0);
        const double v1 = base * (std::sqrt(1 + delta) + std::sqrt(1 - delta));
        const double v2 = base * (std::sqrt(1 + delta) - std::sqrt(1 - delta));
        // f(x) = (1/4pi^2) int int (1/ts) exp(-(x+s2)/ts) I_0(2 sqrt(x s2)/ts) dphi1 dphi2
        const double quad = integrate(
            [&](double p1) {
                return integrate(
                    [&](double p2) {
                        const double s2 = v1 * v1 + v2 * v2 + 2.0 * v1 * v2 * std::cos(p1 - p2);
                        return std::exp(-(x + s2) / ts) / ts * bessel_i(0, 2.0 * std::sqrt(x * s2) / ts);
                    },
                    0.0, 2.0 * M_PI, 1e-10);
            },
            0.0, 2.0 * M_PI, 1e-10) / (4.0 * M_PI * M_PI);
        CHECK_THAT(twdp_pdf(x, kc, delta, ts, {300, 1e-13, 3}), Catch::Matchers::WithinRel(quad, 1e-9));
    }
    CHECK_THROWS_AS(twdp_pdf(1.0, 5.0, 2.0, 1.0), std::domain_error);
}

TEST_CASE("determinism of evaluation") {
    // identical inputs give bitwise identical outputs
    const FtrParams p{3.3, 7.0, 0.42, 2.0};
    const auto t1 = build_coefficients(p, {512, 1e-11, 3});
    const auto t2 = build_coefficients(p, {512, 1e-11, 3});
    REQUIRE(t1.terms.size() == t2.terms.size());
    for (std::size_t j = 0; j < t1.terms.size(); ++j) {
        CHECK(t1.terms[j].log_magnitude == t2.terms[j].log_magnitude);
        CHECK(t1.terms[j].sign == t2.terms[j].sign);
    }
    CHECK(ftr_pdf(1.234, t1) == ftr_pdf(1.234, t2));
}
