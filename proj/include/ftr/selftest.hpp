// SPDX-License-Identifier: Apache-2.0
//
// Embedded oracle suite: the release-gate invariants at reduced resolution.
// Each invariant is named; any failure reports which one broke.
#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ftr/ftr_dist.hpp"
#include "ftr/link_metrics.hpp"
#include "ftr/mc.hpp"
#include "ftr/quadrature.hpp"

namespace ftr {

struct SelfTestCase {
    std::string name;
    std::function<std::optional<std::string>(void)> run;  // nullopt = pass
};

namespace detail {

inline std::optional<std::string> fail_fmt(const char* fmt, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return std::string(buf);
}

}  // namespace detail

inline std::vector<SelfTestCase> selftest_cases() {
    using detail::fail_fmt;
    std::vector<SelfTestCase> cases;

    cases.push_back({"gamma-recurrence", []() -> std::optional<std::string> {
        for (double x = 0.1; x < 50.0; x += 0.7) {
            const double d = std::fabs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x));
            if (d > 1e-12) return fail_fmt("|lgamma(x+1)-lgamma(x)-ln x| = %.3e at x=%.3f", d, x);
        }
        return std::nullopt;
    }});

    cases.push_back({"regularized-gamma-complement", []() -> std::optional<std::string> {
        for (int n : {1, 2, 5, 12, 40})
            for (double x : {0.05, 0.8, 3.0, 17.5, 60.0}) {
                const double s = lower_regularized_gamma(n, x) + regularized_gamma_q(static_cast<double>(n), x);
                if (std::fabs(s - 1.0) > 1e-12) return fail_fmt("P+Q-1 = %.3e at n-ish %.0f", s - 1.0, static_cast<double>(n));
            }
        return std::nullopt;
    }});

    cases.push_back({"gauss-2f1-contiguous", []() -> std::optional<std::string> {
        // Gauss relation: (c-2a-(b-a)z)F(a) + a(1-z)F(a+1) - (c-a)F(a-1) = 0
        const double abc[][4] = {{1.5, 2.25, 4.0, 0.3}, {2.0, 5.5, 7.25, 0.62}, {1.0, 11.5, 13.0, 0.8}};
        for (const auto& t : abc) {
            const double a = t[0], b = t[1], c = t[2], z = t[3];
            const double f0 = gauss_2f1(a, b, c, z).value;
            const double fp = gauss_2f1(a + 1.0, b, c, z).value;
            const double fm = gauss_2f1(a - 1.0, b, c, z).value;
            const double r = (c - 2.0 * a - (b - a) * z) * f0 + a * (1.0 - z) * fp - (c - a) * fm;
            if (std::fabs(r) > 1e-9 * (std::fabs(f0) + std::fabs(fp) + std::fabs(fm)))
                return fail_fmt("contiguous residual %.3e at z=%.2f", r, z);
        }
        return std::nullopt;
    }});

    cases.push_back({"legendre-degree-recurrence", []() -> std::optional<std::string> {
        for (double z : {1.001, 1.3, 4.0, 10.0})
            for (int mu : {0, -1, -3})
                for (double nu : {0.7, 2.3, 9.5}) {
                    const double p0 = assoc_legendre_p(nu - 1.0, mu, z);
                    const double p1 = assoc_legendre_p(nu, mu, z);
                    const double p2 = assoc_legendre_p(nu + 1.0, mu, z);
                    const double lhs = (nu - mu + 1.0) * p2;
                    const double rhs = (2.0 * nu + 1.0) * z * p1 - (nu + mu) * p0;
                    if (std::fabs(lhs - rhs) > 1e-9 * (std::fabs(lhs) + std::fabs(rhs) + 1e-30))
                        return fail_fmt("degree recurrence residual %.3e at z=%.3f", lhs - rhs, z);
                }
        return std::nullopt;
    }});

    cases.push_back({"bessel-parity", []() -> std::optional<std::string> {
        for (int n : {0, 1, 2, 5, 11})
            for (double x : {0.3, 2.0, 7.5, 30.0}) {
                const double a = bessel_i(n, -x) - ((n % 2) ? -1.0 : 1.0) * bessel_i(n, x);
                const double b = bessel_i(-n, x) - bessel_i(n, x);
                if (std::fabs(a) > 1e-14 * std::fabs(bessel_i(n, x)) || b != 0.0)
                    return fail_fmt("parity residual %.3e at x=%.2f", a + b, x);
            }
        return std::nullopt;
    }});

    cases.push_back({"dj-imag-residue", []() -> std::optional<std::string> {
        for (double m : {0.5, 5.5, 10.0})
            for (double k : {1.0, 15.0})
                for (double d : {0.35, 1.0})
                    for (int j : {0, 3, 10, 25}) {
                        const double r = dj_imag_residue(j, {m, k, d, 1.0});
                        if (r > 1e-10) return fail_fmt("residue %.3e at j=%.0f", r, static_cast<double>(j));
                    }
        return std::nullopt;
    }});

    cases.push_back({"legendre-branch-mutation", []() -> std::optional<std::string> {
        // The real-axis reading must break the phase pairing loudly.
        const double r = dj_imag_residue(20, {0.5, 15.0, 0.9, 1.0}, LegendreBranch::kRealAxis);
        if (r <= 1e-10)
            return fail_fmt("mutated branch residue %.3e did not trip (expected > 1e-10)", r, 0.0);
        return std::nullopt;
    }});

    cases.push_back({"coefficient-normalization", []() -> std::optional<std::string> {
        for (double m : {0.5, 1.5, 10.0})
            for (double k : {0.0, 5.0, 15.0})
                for (double d : {0.0, 0.5, 1.0}) {
                    const auto t = build_coefficients({m, k, d, 1.0}, {2048, 1e-12, 3});
                    if (std::fabs(t.coefficient_sum - 1.0) > 1e-8)
                        return fail_fmt("sum-1 = %.3e at m=%.1f", t.coefficient_sum - 1.0, m);
                }
        return std::nullopt;
    }});

    cases.push_back({"pdf-normalization-quadrature", []() -> std::optional<std::string> {
        const auto t = build_coefficients({1.5, 15.0, 0.5, 1.0}, {2048, 1e-12, 3});
        const double integral = integrate([&](double x) { return ftr_pdf(x, t); }, 0.0, 60.0, 1e-9) +
                                integrate_to_inf([&](double x) { return ftr_pdf(x, t); }, 60.0, 1e-9);
        if (std::fabs(integral - 1.0) > 1e-6) return fail_fmt("integral pdf = 1%+.3e", integral - 1.0, 0.0);
        return std::nullopt;
    }});

    cases.push_back({"pdf-mixture-oracle", []() -> std::optional<std::string> {
        // closed form against the shadowing mixture of the TWDP density
        const FtrParams p{5.5, 3.0, 1.0, 1.0};
        const auto t = build_coefficients(p, {1024, 1e-12, 3});
        const SeriesControl oracle_ctl{512, 1e-13, 3};
        for (double x : {0.3, 1.0, 2.5}) {
            const double closed = ftr_pdf(x, t);
            const double mixed = integrate(
                [&](double u) {
                    const double fz = std::exp(p.m * std::log(p.m) + (p.m - 1.0) * std::log(u) -
                                               p.m * u - std::lgamma(p.m));
                    return fz * twdp_pdf(x, u * p.k, p.delta, p.two_sigma_sq(), oracle_ctl);
                },
                1e-12, 12.0, 1e-9);
            if (std::fabs(closed - mixed) > 1e-6 * std::fabs(mixed))
                return fail_fmt("pdf %.6e vs mixture %.6e", closed, mixed);
        }
        return std::nullopt;
    }});

    cases.push_back({"cdf-pdf-consistency", []() -> std::optional<std::string> {
        const auto t = build_coefficients({10.0, 10.0, 0.5, 1.0}, {1024, 1e-12, 3});
        for (double x : {0.2, 0.8, 1.7}) {
            const double h = 1e-4;
            const double der = (ftr_cdf(x + h, t) - ftr_cdf(x - h, t)) / (2.0 * h);
            const double pdf = ftr_pdf(x, t);
            if (std::fabs(der - pdf) > 1e-4 * std::fabs(pdf))
                return fail_fmt("dF/dx %.6e vs pdf %.6e", der, pdf);
        }
        return std::nullopt;
    }});

    cases.push_back({"rayleigh-reduction", []() -> std::optional<std::string> {
        const FtrParams p{1.0, 0.0, 0.0, 1.0};
        const auto t = build_coefficients(p);
        for (double x : {0.0, 0.5, 2.0, 7.0}) {
            if (std::fabs(ftr_pdf(x, t) - std::exp(-x)) > 1e-12)
                return fail_fmt("pdf-exp(-x) at x=%.1f: %.3e", x, ftr_pdf(x, t) - std::exp(-x));
            if (std::fabs(ftr_cdf(x, t) - (-std::expm1(-x))) > 1e-12)
                return fail_fmt("cdf reduction failed at x=%.1f (%.3e)", x, ftr_cdf(x, t));
        }
        const double dbpsk = ber_exact(t, ModulationScheme::dbpsk()).value;
        if (std::fabs(dbpsk - 0.25) > 1e-12) return fail_fmt("dbpsk K=0 ber %.15f != 0.25", dbpsk, 0.0);
        return std::nullopt;
    }});

    cases.push_back({"capacity-quadrature", []() -> std::optional<std::string> {
        const auto t = build_coefficients({10.3, 10.0, 0.5, 10.0}, {1024, 1e-12, 3});
        const double cap = capacity(t).value;
        const double quad = integrate([&](double x) { return std::log2(1.0 + x) * ftr_pdf(x, t); },
                                      0.0, 400.0, 1e-10) +
                            integrate_to_inf([&](double x) { return std::log2(1.0 + x) * ftr_pdf(x, t); },
                                             400.0, 1e-10);
        if (std::fabs(cap - quad) > 1e-7 * std::fabs(quad)) return fail_fmt("capacity %.9f vs quad %.9f", cap, quad);
        return std::nullopt;
    }});

    cases.push_back({"ber-quadrature", []() -> std::optional<std::string> {
        FtrParams p{10.5, 25.0, 0.35, 10.0};  // 10 dB
        const auto t = build_coefficients(p, {1024, 1e-12, 3});
        const auto mod = ModulationScheme::bpsk();
        const double ber = ber_exact(t, mod).value;
        // quadrature of the CDF form with the sqrt substitution taming x^{beta-1}
        const double quad = std::exp(mod.beta * std::log(mod.alpha) - std::log(2.0) - std::lgamma(mod.beta)) *
                            integrate([&](double v) {
                                return 2.0 * std::pow(v, 2.0 * mod.beta - 1.0) *
                                       std::exp(-mod.alpha * v * v) * ftr_cdf(v * v, t);
                            }, 0.0, 40.0, 1e-11);
        if (std::fabs(ber - quad) > 1e-8 * std::fabs(quad)) return fail_fmt("ber %.9e vs quad %.9e", ber, quad);
        return std::nullopt;
    }});

    cases.push_back({"ber-asymptote-j0-identity", []() -> std::optional<std::string> {
        const FtrParams p{3.7, 6.0, 0.6, std::pow(10.0, 2.5)};
        const auto mod = ModulationScheme::bpsk();
        const double asym = ber_asymptotic(p, mod);
        // j = 0 series term with the kernel replaced by its leading expansion
        const double d0 = dj_coefficient(0, p).value();
        const double j0 = std::exp(p.m * std::log(p.m) - std::lgamma(p.m)) * d0 *
                          std::exp(std::lgamma(mod.beta + 1.0) - std::log(2.0) - std::lgamma(mod.beta)) /
                          (mod.alpha * p.two_sigma_sq());
        if (std::fabs(asym - j0) > 1e-12 * std::fabs(j0)) return fail_fmt("asym %.12e vs j0 %.12e", asym, j0);
        return std::nullopt;
    }});

    cases.push_back({"ks-self-acceptance", []() -> std::optional<std::string> {
        const auto rep = ks_test({10.0, 10.0, 0.5, 1.0}, 10000, 0.05, 20260101);
        if (!rep.accepted) return fail_fmt("KS T=%.5f >= %.5f", rep.statistic, rep.critical);
        return std::nullopt;
    }});

    cases.push_back({"mc-mean-snr", []() -> std::optional<std::string> {
        const FtrParams p{10.0, 10.0, 0.5, 1.0};
        const auto emp = sample_channel(p, 200000, 7);
        long double s = 0.0L;
        for (double v : emp.samples) s += v;
        const double mean = static_cast<double>(s / emp.count);
        if (std::fabs(mean - 1.0) > 0.02) return fail_fmt("empirical mean snr %.4f vs 1", mean, 0.0);
        return std::nullopt;
    }});

    return cases;
}

/// Runs every invariant; prints one line each; returns the failure count.
inline int run_selftest(std::ostream& out) {
    int failures = 0;
    for (const auto& c : selftest_cases()) {
        std::optional<std::string> err;
        try {
            err = c.run();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        if (err) {
            ++failures;
            out << "FAIL " << c.name << ": " << *err << "\n";
        } else {
            out << "ok   " << c.name << "\n";
        }
    }
    out << (failures == 0 ? "selftest passed" : "selftest FAILED") << " ("
        << selftest_cases().size() << " invariants, " << failures << " failures)\n";
    return failures;
}

}  // namespace ftr
