// SPDX-License-Identifier: Apache-2.0
//
// Fluctuating two-ray distribution core: channel parameters, the gamma-mixture
// coefficient series for arbitrary m > 0, and the exact PDF/CDF of the
// instantaneous SNR built from it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftr/errors.hpp"
#include "ftr/log_signed.hpp"
#include "ftr/specfun.hpp"

namespace ftr {

/// Channel parameter tuple. m is the shadowing severity of the specular
/// fluctuation, K the specular-to-diffuse power ratio, delta the balance of
/// the two specular amplitudes, avg_snr the mean SNR in linear scale.
struct FtrParams {
    double m;
    double k;
    double delta;
    double avg_snr = 1.0;

    void validate() const {
        if (!(m > 0.0)) throw std::domain_error("FtrParams: requires m > 0");
        if (!(k >= 0.0)) throw std::domain_error("FtrParams: requires K >= 0");
        if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("FtrParams: requires 0 <= delta <= 1");
        if (!(avg_snr > 0.0)) throw std::domain_error("FtrParams: requires avg_snr > 0");
    }

    /// Diffuse power 2*sigma^2 under unit transmit SNR: avg_snr / (1 + K).
    double two_sigma_sq() const { return avg_snr / (1.0 + k); }
};

/// Truncation budget and tolerance shared by every infinite-series evaluation.
struct SeriesControl {
    int max_terms = 40;
    double rel_tol = 1e-9;
    int tail_window = 3;

    void validate() const {
        if (max_terms < 1) throw std::domain_error("SeriesControl: requires max_terms >= 1");
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::domain_error("SeriesControl: requires 0 < rel_tol < 1");
        if (tail_window < 1) throw std::domain_error("SeriesControl: requires tail_window >= 1");
    }
};

/// Folded mixture coefficients c_j = m^m/Gamma(m) * K^j d_j / j! for one
/// parameter set. Immutable after construction; safe to share across threads.
struct CoefficientTable {
    FtrParams params;
    std::vector<LogSigned> terms;
    double truncation_error_bound = 0.0;
    bool converged = true;
    double coefficient_sum = 0.0;  // sum of materialized terms; ~1 when converged

    std::size_t terms_used() const { return terms.size(); }
};

namespace detail {

inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    const int kk = std::min(k, n - k);  // symmetric form keeps pair terms bit-identical
    return std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0);
}

struct DjAssembly {
    LogSigned value;
    double imag_residue;   // |Im| / max(|Re|, tiny), from the complex assembly
    double log_abs_sum;    // log sum of |term|; log_abs_sum - log|value| measures cancellation
};

/// Literal Eq.-style double binomial assembly of d_j: each (k,l) term carries
/// the phase i^{2l-k} and the Legendre factor on the below-cut branch; real
/// and imaginary parts accumulate separately and the imaginary residue is
/// returned for the consistency check.
inline DjAssembly dj_assemble(int j, const FtrParams& p, LegendreBranch branch) {
    const double m = p.m, K = p.k, D = p.delta;
    const double A = (m + K) * (m + K) - (K * D) * (K * D);
    const double log_a = std::log(A);
    const double nu = j + m - 1.0;

    if (D == 0.0 || K == 0.0) {
        // single surviving term k = l = 0; P_{nu}(1) = 1, never touches the
        // divergent positive-order corner at argument 1
        const double lv = std::lgamma(j + m) - (j + m) * std::log(m + K);
        return {LogSigned::from_log(lv, 1), 0.0, lv};
    }

    const double z = (m + K) / std::sqrt(A);
    const double log_half_delta = std::log(D / 2.0);

    // Legendre magnitudes per |order| (the reflection makes +s and -s terms
    // share one evaluation)
    std::vector<LogSigned> pneg(j + 1);
    for (int s = 0; s <= j; ++s) pneg[s] = detail::legendre_p_neg_log(nu, s, z);

    ScaledSum re, im;
    for (int k = 0; k <= j; ++k) {
        const double lk = log_binomial(j, k) + k * log_half_delta;
        for (int l = 0; l <= k; ++l) {
            const int mu = k - 2 * l;           // Legendre order
            const int s = std::abs(mu);
            const int iq = ((2 * l - k) % 4 + 4) % 4;  // phase i^{2l-k}
            // magnitude of P^{mu}: reflection coefficient for positive orders
            double lp = pneg[s].log_magnitude;
            int psign = pneg[s].sign;
            if (mu > 0) lp += std::lgamma(nu + s + 1.0) - std::lgamma(nu - s + 1.0);
            if (psign == 0) continue;
            int q = iq;
            if (branch == LegendreBranch::kBelowCut) q = (q + ((-mu) % 4 + 4)) % 4;  // * i^{-mu}
            const double lt = lk + log_binomial(k, l) + std::lgamma(j + m + 2.0 * l - k) -
                              0.5 * (j + m) * log_a + lp;
            switch (q) {
                case 0: re.add_log(lt, psign); break;
                case 1: im.add_log(lt, psign); break;
                case 2: re.add_log(lt, -psign); break;
                case 3: im.add_log(lt, -psign); break;
            }
            re.add_abs(lt);
        }
    }
    const LogSigned rval = re.to_log_signed();
    const LogSigned ival = im.to_log_signed();
    double residue = 0.0;
    if (!ival.is_zero()) {
        const double ref = rval.is_zero() ? -700.0 : rval.log_magnitude;
        residue = std::exp(ival.log_magnitude - ref);
    }
    return {rval, residue, re.abs_log()};
}

}  // namespace detail

/// Cancellation factor sum|term| / |d_j| of the binomial assembly; quantifies
/// how many digits the literal route loses at a given (j, params).
inline double dj_cancellation(int j, const FtrParams& params) {
    params.validate();
    const auto a = detail::dj_assemble(j, params, LegendreBranch::kBelowCut);
    if (a.value.is_zero()) return std::numeric_limits<double>::infinity();
    return std::exp(a.log_abs_sum - a.value.log_magnitude);
}

/// d_j of the coefficient series, assembled in complex arithmetic from the
/// double binomial sum with the i^{2l-k} phase factor and the below-cut
/// Legendre kernel, returned as the real part.
inline LogSigned dj_coefficient(int j, const FtrParams& params,
                                LegendreBranch branch = LegendreBranch::kBelowCut) {
    if (j < 0) throw std::domain_error("dj_coefficient: requires j >= 0");
    params.validate();
    const auto asm_ = detail::dj_assemble(j, params, branch);
    if (asm_.imag_residue > 1e-10)
        throw consistency_error("dj_coefficient: imaginary residue " + std::to_string(asm_.imag_residue) +
                                " at j=" + std::to_string(j) +
                                " exceeds 1e-10; Legendre branch handling is inconsistent");
    return asm_.value;
}

/// Imaginary residue of the d_j assembly without the consistency throw.
/// Exposed for the residue sweep in the validation suites.
inline double dj_imag_residue(int j, const FtrParams& params,
                              LegendreBranch branch = LegendreBranch::kBelowCut) {
    params.validate();
    return detail::dj_assemble(j, params, branch).imag_residue;
}

namespace detail {

/// One trapezoid pass of the stable coefficient route at a fixed node count.
/// c_j = (1/pi) int_0^pi w_j(t) dt with w_j the negative-binomial weight of a
/// Rician-shadowed channel at K(1 + delta cos t). The integrand is positive,
/// so the pass is cancellation-free at any j; the binomial-Legendre assembly
/// above is the same number but loses digits factorially with j.
struct CoeffPass {
    std::vector<double> coeffs;
    bool converged = false;
    int j_stop = 0;
    double bound = 0.0;
};

inline CoeffPass coeff_pass(const FtrParams& p, const SeriesControl& ctl, int nodes) {
    const double m = p.m, K = p.k, D = p.delta;
    const int n_theta = (D == 0.0) ? 1 : nodes;
    std::vector<double> lw(n_theta), lr(n_theta), weight(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        double g;
        if (D == 0.0) {
            g = K;
            weight[i] = 1.0;
        } else {
            const double th = M_PI * i / (n_theta - 1.0);
            g = K * (1.0 + D * std::cos(th));
            if (g < 0.0) g = 0.0;
            weight[i] = (i == 0 || i == n_theta - 1) ? 0.5 / (n_theta - 1.0) : 1.0 / (n_theta - 1.0);
        }
        lw[i] = m * (std::log(m) - std::log(m + g));  // log NB_0
        lr[i] = g > 0.0 ? std::log(g) - std::log(m + g) : -std::numeric_limits<double>::infinity();
    }

    CoeffPass out;
    out.coeffs.reserve(std::min(ctl.max_terms + 1, 1024));
    double run = 0.0;
    int below = 0;
    std::vector<double> window;
    for (int j = 0; j <= ctl.max_terms; ++j) {
        double c = 0.0;
        for (int i = 0; i < n_theta; ++i)
            if (std::isfinite(lw[i])) c += weight[i] * std::exp(lw[i]);
        out.coeffs.push_back(c);
        run += c;
        window.push_back(c);
        if (static_cast<int>(window.size()) > ctl.tail_window) window.erase(window.begin());
        if (run > 0.0 && c < ctl.rel_tol * run) {
            if (++below >= ctl.tail_window) {
                out.converged = true;
                out.j_stop = j;
                out.bound = *std::max_element(window.begin(), window.end());
                return out;
            }
        } else {
            below = 0;
        }
        const double step = std::log((j + m) / (j + 1.0));
        for (int i = 0; i < n_theta; ++i) lw[i] += step + lr[i];
    }
    out.converged = false;
    out.j_stop = ctl.max_terms;
    out.bound = *std::max_element(window.begin(), window.end());
    return out;
}

}  // namespace detail

/// Build the folded coefficient table for a parameter set. Truncation stops at
/// the first index where tail_window consecutive folded terms fall below
/// rel_tol of the running sum; if the cap is hit first the table carries a
/// truncation warning (converged = false) and the bound is reported anyway.
inline CoefficientTable build_coefficients(const FtrParams& params, const SeriesControl& ctl = {}) {
    params.validate();
    ctl.validate();
    CoefficientTable table;
    table.params = params;

    if (params.k == 0.0) {
        table.terms = {LogSigned::from_log(0.0, 1)};
        table.truncation_error_bound = 0.0;
        table.converged = true;
        table.coefficient_sum = 1.0;
        return table;
    }

    detail::CoeffPass pass = detail::coeff_pass(params, ctl, 129);
    for (int nodes = 257; nodes <= (1 << 15) + 1; nodes = 2 * (nodes - 1) + 1) {
        const detail::CoeffPass next = detail::coeff_pass(params, ctl, nodes);
        double diff = 0.0, sum = 0.0;
        const std::size_t n = std::min(pass.coeffs.size(), next.coeffs.size());
        for (std::size_t j = 0; j < n; ++j) {
            diff = std::max(diff, std::fabs(next.coeffs[j] - pass.coeffs[j]));
            sum += next.coeffs[j];
        }
        const bool same_len = pass.coeffs.size() == next.coeffs.size();
        pass = next;
        if (same_len && diff <= 0.05 * ctl.rel_tol * std::max(sum, 1e-300)) break;
    }

    table.terms.reserve(pass.coeffs.size());
    double sum = 0.0;
    for (double c : pass.coeffs) {
        table.terms.push_back(LogSigned::from_value(c));
        sum += c;
    }
    table.truncation_error_bound = pass.bound;
    table.converged = pass.converged;
    table.coefficient_sum = sum;
    return table;
}

/// Exact PDF of the instantaneous SNR: sum_j c_j f_G(x; j+1, 2 sigma^2),
/// each gamma-density term evaluated in log space.
inline double ftr_pdf(double x, const CoefficientTable& table) {
    if (x < 0.0) throw std::domain_error("ftr_pdf: requires x >= 0");
    const double ts = table.params.two_sigma_sq();
    if (x == 0.0) {
        // only the j = 0 exponential component is nonzero at the origin
        return table.terms.empty() ? 0.0 : table.terms[0].value() / ts;
    }
    const double lx = std::log(x);
    const double ls = std::log(ts);
    const double xs = x / ts;
    double acc = 0.0;
    for (std::size_t j = 0; j < table.terms.size(); ++j) {
        const LogSigned& c = table.terms[j];
        if (c.sign == 0) continue;
        const double lg = j * lx - xs - std::lgamma(j + 1.0) - (j + 1.0) * ls;
        acc += c.sign * std::exp(c.log_magnitude + lg);
    }
    return acc > 0.0 ? acc : 0.0;
}

/// Exact CDF: sum_j c_j P(j+1, x / 2 sigma^2). The regularized gamma values
/// across shapes follow the one-step Poisson-term recurrence, so a full table
/// evaluation is O(terms) per point.
inline double ftr_cdf(double x, const CoefficientTable& table) {
    if (x < 0.0) throw std::domain_error("ftr_cdf: requires x >= 0");
    if (x == 0.0) return 0.0;
    const double y = x / table.params.two_sigma_sq();
    const double ly = std::log(y);
    double p = -std::expm1(-y);  // P(1, y)
    double lpois = -y;           // log Poisson(0; y)
    double acc = 0.0;
    for (std::size_t j = 0; j < table.terms.size(); ++j) {
        if (j > 0) {
            lpois += ly - std::log(static_cast<double>(j));
            p -= std::exp(lpois);
            if (p < 0.0) p = 0.0;
        }
        const LogSigned& c = table.terms[j];
        if (c.sign == 0) continue;
        acc += c.sign * std::exp(c.log_magnitude) * p;
    }
    return std::min(std::max(acc, 0.0), 1.0);
}

/// TWDP SNR density (the FTR model conditioned on unit shadowing), as the
/// gamma mixture with Bessel-sum weights t_j. Serves as the bridge between
/// the closed form and the Appendix mixture-integral oracle.
inline double twdp_pdf(double x, double k_cond, double delta, double two_sigma_sq,
                       const SeriesControl& ctl = {}) {
    if (x < 0.0) throw std::domain_error("twdp_pdf: requires x >= 0");
    if (k_cond < 0.0) throw std::domain_error("twdp_pdf: requires k_cond >= 0");
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::domain_error("twdp_pdf: requires 0 <= delta <= 1");
    if (!(two_sigma_sq > 0.0)) throw std::domain_error("twdp_pdf: requires two_sigma_sq > 0");
    ctl.validate();

    if (k_cond == 0.0)  // only the j = 0 term survives: plain exponential SNR
        return std::exp(-x / two_sigma_sq) / two_sigma_sq;

    const double arg = -k_cond * delta;  // Bessel argument of Eq. (21) form
    const double lx = x > 0.0 ? std::log(x) : 0.0;
    const double ls = std::log(two_sigma_sq);
    const double xs = x / two_sigma_sq;

    // orders repeat across (j, k, l); memoize I_n(arg) by |n|
    std::vector<double> bessel_memo;
    auto bessel_at = [&](int n) {
        const std::size_t a = static_cast<std::size_t>(std::abs(n));
        while (bessel_memo.size() <= a)
            bessel_memo.push_back(bessel_i(static_cast<int>(bessel_memo.size()), arg));
        return bessel_memo[a];
    };
    std::vector<double> lfact{0.0};  // log n!
    auto lchoose = [&](int n, int k) {
        while (static_cast<int>(lfact.size()) <= n)
            lfact.push_back(lfact.back() + std::log(static_cast<double>(lfact.size())));
        return lfact[n] - lfact[k] - lfact[n - k];
    };

    double acc = 0.0;
    double weight_sum = 0.0;
    int below = 0;
    for (int j = 0; j <= ctl.max_terms; ++j) {
        // t_j: double binomial sum over Bessel orders
        long double tj = 0.0L;
        for (int k = 0; k <= j; ++k) {
            if (delta == 0.0 && k > 0) break;
            const double lk = lchoose(j, k) + (k > 0 ? k * std::log(delta / 2.0) : 0.0);
            long double inner = 0.0L;
            for (int l = 0; l <= k; ++l)
                inner += std::exp(lchoose(k, l)) * static_cast<long double>(bessel_at(2 * l - k));
            tj += std::exp(lk) * inner;
        }
        double fg;
        if (x == 0.0) {
            fg = (j == 0) ? 1.0 / two_sigma_sq : 0.0;
        } else {
            fg = std::exp(j * lx - xs - std::lgamma(j + 1.0) - (j + 1.0) * ls);
        }
        const double weight = static_cast<double>(tj) * std::exp(-k_cond + j * std::log(k_cond) - std::lgamma(j + 1.0));
        acc += weight * fg;
        weight_sum += std::fabs(weight);
        if (j > k_cond && std::fabs(weight) < ctl.rel_tol * std::max(weight_sum, 1e-300)) {
            if (++below >= ctl.tail_window) return acc > 0.0 ? acc : 0.0;
        } else {
            below = 0;
        }
    }
    throw convergence_error("twdp_pdf", acc, 0.0, ctl.max_terms);
}

}  // namespace ftr
