// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>

namespace ftr {

/// Sign-and-log representation of a real number: value = sign * exp(log_magnitude).
/// sign == 0 encodes exact zero; log_magnitude is then ignored.
struct LogSigned {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogSigned zero() { return {}; }

    static LogSigned from_log(double log_mag, int s) {
        if (s == 0) return {};
        return {log_mag, s > 0 ? 1 : -1};
    }

    static LogSigned from_value(double v) {
        if (v == 0.0) return {};
        return {std::log(std::fabs(v)), v > 0.0 ? 1 : -1};
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }

    bool is_zero() const { return sign == 0; }

    LogSigned operator*(const LogSigned& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {log_magnitude + o.log_magnitude, sign * o.sign};
    }

    LogSigned operator/(const LogSigned& o) const {
        return {log_magnitude - o.log_magnitude, sign * o.sign};
    }
};

/// Accumulator for sums of LogSigned terms spanning many orders of magnitude.
/// Keeps a long double mantissa and a power-of-two offset; rescales as needed.
/// The extended mantissa buys ~3 extra digits against cancellation in the
/// alternating binomial sums of the coefficient assembly.
class ScaledSum {
  public:
    void add(const LogSigned& t) {
        if (t.sign == 0) return;
        add_log(t.log_magnitude, t.sign);
    }

    void add_log(double log_mag, int sign) {
        if (sign == 0) return;
        const double e2 = log_mag * kInvLn2;
        int ei = static_cast<int>(std::floor(e2));
        long double mant = sign * std::exp2(static_cast<long double>(e2 - ei));
        if (mant_ == 0.0L) {
            mant_ = mant;
            exp_ = ei;
        } else if (ei > exp_) {
            long double sh = std::exp2(static_cast<long double>(exp_ - ei));
            mant_ = mant_ * sh + mant;
            exp_ = ei;
        } else {
            mant_ += mant * std::exp2(static_cast<long double>(ei - exp_));
        }
        renormalize();
    }

    bool is_zero() const { return mant_ == 0.0L; }

    LogSigned to_log_signed() const {
        if (mant_ == 0.0L) return LogSigned::zero();
        double lm = static_cast<double>(std::log(std::fabs(mant_)) + exp_ * kLn2);
        return LogSigned::from_log(lm, mant_ > 0.0L ? 1 : -1);
    }

    double value() const { return to_log_signed().value(); }

    /// log of the sum of |term| over everything added so far (cancellation diagnostics).
    void add_abs(double log_mag) {
        abs_.add_log(log_mag, 1);
        // abs_ never cancels, no renormalization subtleties
    }

  private:
    static constexpr double kLn2 = 0.6931471805599453094;
    static constexpr double kInvLn2 = 1.4426950408889634074;

    void renormalize() {
        if (mant_ == 0.0L) { exp_ = 0; return; }
        int k;
        mant_ = std::frexp(mant_, &k);
        exp_ += k;
    }

    long double mant_ = 0.0L;
    int exp_ = 0;

    struct AbsSum {
        long double mant = 0.0L;
        int exp = 0;
        void add_log(double log_mag, int) {
            const double e2 = log_mag * kInvLn2;
            int ei = static_cast<int>(std::floor(e2));
            long double m = std::exp2(static_cast<long double>(e2 - ei));
            if (mant == 0.0L) { mant = m; exp = ei; }
            else if (ei > exp) { mant = mant * std::exp2(static_cast<long double>(exp - ei)) + m; exp = ei; }
            else { mant += m * std::exp2(static_cast<long double>(ei - exp)); }
            int k; mant = std::frexp(mant, &k); exp += k;
        }
    } abs_;

  public:
    double abs_log() const {
        if (abs_.mant == 0.0L) return -std::numeric_limits<double>::infinity();
        return static_cast<double>(std::log(abs_.mant) + abs_.exp * kLn2);
    }
};

}  // namespace ftr
