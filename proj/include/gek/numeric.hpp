#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace gek {

using complex = std::complex<double>;

// A number v kept as log|v| plus the unit phase v/|v|.  Survives magnitudes
// far outside double range (Hermite polynomials at degree ~10^6, Airy values
// at argument ~10^4) while ordinary complex arithmetic would overflow.
struct LogScaledValue {
    double log_magnitude = 0.0;       // natural log of |v|
    complex phase = {1.0, 0.0};       // v/|v|; exactly 1 when zero_flag
    bool zero_flag = false;

    static LogScaledValue zero() { return {0.0, {1.0, 0.0}, true}; }

    static LogScaledValue from(complex v) {
        double m = std::abs(v);
        if (m == 0.0) return zero();
        return {std::log(m), v / m, false};
    }

    // log-domain constructor: v = exp(log_mag) * unit_phase
    static LogScaledValue from_log(double log_mag, complex unit_phase) {
        return {log_mag, unit_phase, false};
    }

    complex value() const {
        if (zero_flag) return {0.0, 0.0};
        return std::exp(log_magnitude) * phase;
    }

    LogScaledValue operator*(const LogScaledValue& o) const {
        if (zero_flag || o.zero_flag) return zero();
        return {log_magnitude + o.log_magnitude, phase * o.phase, false};
    }

    LogScaledValue scaled(double log_factor) const {
        if (zero_flag) return zero();
        return {log_magnitude + log_factor, phase, false};
    }

    LogScaledValue negated() const {
        if (zero_flag) return zero();
        return {log_magnitude, -phase, false};
    }
};

// Accumulates sums of log-scaled terms by rescaling to the running maximum
// exponent, so that kernels summing ~N terms of wildly varying magnitude
// stay finite all the way through.
class ScaledSum {
public:
    void add(const LogScaledValue& t) {
        if (t.zero_flag) return;
        peak_ = empty_ ? t.log_magnitude : std::max(peak_, t.log_magnitude);
        if (empty_) {
            ref_ = t.log_magnitude;
            acc_ = t.phase;
            empty_ = false;
            return;
        }
        if (t.log_magnitude > ref_ + 1.0) {
            // new dominant scale; fold the old accumulator underneath it
            acc_ = acc_ * std::exp(ref_ - t.log_magnitude) + t.phase;
            ref_ = t.log_magnitude;
        } else {
            acc_ += t.phase * std::exp(t.log_magnitude - ref_);
        }
    }

    void add(complex v) { add(LogScaledValue::from(v)); }

    bool empty() const { return empty_; }

    // log of the largest term magnitude seen; peak_log() - result log is the
    // number of e-folds lost to cancellation
    double peak_log() const { return peak_; }

    LogScaledValue result() const {
        if (empty_) return LogScaledValue::zero();
        double m = std::abs(acc_);
        if (m == 0.0) return LogScaledValue::zero();
        return LogScaledValue::from_log(ref_ + std::log(m), acc_ / m);
    }

    complex value() const { return result().value(); }

private:
    double ref_ = 0.0;
    double peak_ = 0.0;
    complex acc_ = {0.0, 0.0};
    bool empty_ = true;
};

namespace detail {

// Minimal double-double arithmetic.  Only what the Airy Maclaurin series
// needs: the series suffers e^{(4/3)|z|^{3/2}} cancellation near the
// positive real axis, so plain doubles cannot reach the asymptotic
// crossover radius with full accuracy.
struct dd {
    double hi = 0.0, lo = 0.0;
};

inline dd dd_from(double a) { return {a, 0.0}; }

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd sub(dd a, dd b) { return add(a, {-b.hi, -b.lo}); }

inline dd mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd mul(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd div(dd a, double b) {
    double q1 = a.hi / b;
    dd p = two_prod(q1, b);
    double r = ((a.hi - p.hi) - p.lo + a.lo) / b;
    return quick_two_sum(q1, r);
}

// complex double-double
struct cdd {
    dd re, im;
};

inline cdd cdd_from(complex z) { return {dd_from(z.real()), dd_from(z.imag())}; }

inline cdd add(cdd a, cdd b) { return {add(a.re, b.re), add(a.im, b.im)}; }

inline cdd mul(cdd a, cdd b) {
    return {sub(mul(a.re, b.re), mul(a.im, b.im)),
            add(mul(a.re, b.im), mul(a.im, b.re))};
}

inline cdd mul(cdd a, double b) { return {mul(a.re, b), mul(a.im, b)}; }

inline cdd div(cdd a, double b) { return {div(a.re, b), div(a.im, b)}; }

inline complex to_complex(cdd a) { return {a.re.hi + a.re.lo, a.im.hi + a.im.lo}; }

inline double abs2_hi(cdd a) { return a.re.hi * a.re.hi + a.im.hi * a.im.hi; }

} // namespace detail

} // namespace gek
