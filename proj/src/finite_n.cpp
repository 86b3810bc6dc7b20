#include "gek/finite_n.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gek/errors.hpp"
#include "gek/quad.hpp"
#include "gek/specfun.hpp"

namespace gek::finite_n {

namespace sf = gek::specfun;
namespace qd = gek::quad;

void EnsembleSpec::validate() const {
    if (beta != 1 && beta != 2 && beta != 4)
        throw std::domain_error("EnsembleSpec: beta must be 1, 2 or 4");
    if (n <= 0) throw std::domain_error("EnsembleSpec: n must be positive");
    if ((beta == 1 || beta == 4) && n % 2 != 0)
        throw std::domain_error("EnsembleSpec: n must be even for beta = 1, 4");
    if (!(tau >= 0.0) || tau >= 1.0)
        throw std::domain_error("EnsembleSpec: tau must lie in [0, 1)");
}

double log_weight(int beta, complex z, double tau) {
    if (tau < 0.0 || tau >= 1.0) throw std::domain_error("weight: tau must lie in [0, 1)");
    double x = z.real(), y = z.imag();
    if (beta == 2 || beta == 4) return -x * x / (1.0 + tau) - y * y / (1.0 - tau);
    if (beta == 1) {
        double arg = std::sqrt(2.0 / (1.0 - tau * tau)) * std::abs(y);
        return (y * y - x * x) / (2.0 * (1.0 + tau)) + 0.5 * sf::log_erfc_real(arg);
    }
    throw std::domain_error("weight: beta must be 1, 2 or 4");
}

double weight(int beta, complex z, double tau) { return std::exp(log_weight(beta, z, tau)); }

namespace {

using sf::scaled_hermite_p_sequence;

// running prefix sums of p_j/j!! split by parity, used by the beta = 4
// pre-kernel and by the I_j closed forms; peak logs expose how much the
// partial sums cancelled
struct ParityPrefix {
    std::vector<LogScaledValue> even; // S_even[i] = sum_{m even <= i} p_m / m!!
    std::vector<LogScaledValue> odd;  // S_odd[i]  = sum_{m odd  <= i} p_m / m!!
    std::vector<double> peak_even, peak_odd;
};

ParityPrefix parity_prefix_sums(const std::vector<LogScaledValue>& p) {
    ParityPrefix out;
    out.even.resize(p.size());
    out.odd.resize(p.size());
    out.peak_even.resize(p.size());
    out.peak_odd.resize(p.size());
    ScaledSum se, so;
    for (size_t m = 0; m < p.size(); ++m) {
        LogScaledValue t = p[m].scaled(-sf::log_double_factorial(static_cast<unsigned>(m)));
        if (m % 2 == 0)
            se.add(t);
        else
            so.add(t);
        out.even[m] = se.result();
        out.odd[m] = so.result();
        out.peak_even[m] = se.peak_log();
        out.peak_odd[m] = so.peak_log();
    }
    return out;
}

} // namespace

namespace {

LogScaledValue prekernel_b2_scaled(complex z1, complex z2, int n, double tau) {
    if (n <= 0) throw std::domain_error("prekernel_b2: n must be positive");
    if (tau < 0.0 || tau >= 1.0) throw std::domain_error("prekernel_b2: bad tau");
    auto p1 = sf::scaled_hermite_p_sequence(n - 1, z1, tau);
    auto p2 = sf::scaled_hermite_p_sequence(n - 1, z2, tau);
    ScaledSum sum;
    for (int j = 0; j < n; ++j)
        sum.add((p1[j] * p2[j]).scaled(-sf::log_factorial(j)));
    double norm = M_PI * std::sqrt(1.0 - tau * tau);
    return sum.result().scaled(-std::log(norm));
}

} // namespace

complex prekernel_b2(complex z1, complex z2, int n, double tau) {
    return prekernel_b2_scaled(z1, z2, n, tau).value();
}

complex kernel_b2(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 2) throw std::domain_error("kernel_b2: beta must be 2");
    auto p1 = scaled_hermite_p_sequence(spec.n - 1, z1, spec.tau);
    auto p2 = scaled_hermite_p_sequence(spec.n - 1, z2, spec.tau);
    ScaledSum sum;
    for (int j = 0; j < spec.n; ++j)
        sum.add((p1[j] * p2[j]).scaled(-sf::log_factorial(j)));
    double lw = 0.5 * (log_weight(2, z1, spec.tau) + log_weight(2, z2, spec.tau));
    double norm = M_PI * std::sqrt(1.0 - spec.tau * spec.tau);
    return sum.result().scaled(lw - std::log(norm)).value();
}

namespace {

// one orientation of the triangular beta = 4 double sum via prefix sums:
//   sum_{k odd} p_k(z1)/k!! * S_even(z2, k-1)
LogScaledValue b4_triangular(const std::vector<LogScaledValue>& p1, const ParityPrefix& pre2,
                             int n) {
    ScaledSum sum;
    for (int k = 1; k < n; k += 2) {
        LogScaledValue t = p1[k].scaled(-sf::log_double_factorial(k));
        sum.add(t * pre2.even[k - 1]);
    }
    return sum.result();
}

} // namespace

complex prekernel_b4(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 4) throw std::domain_error("prekernel_b4: beta must be 4");
    int n = spec.n;
    auto p1 = scaled_hermite_p_sequence(n - 1, z1, spec.tau);
    auto p2 = scaled_hermite_p_sequence(n - 1, z2, spec.tau);
    ParityPrefix pre1 = parity_prefix_sums(p1);
    ParityPrefix pre2 = parity_prefix_sums(p2);
    ScaledSum total;
    total.add(b4_triangular(p1, pre2, n));
    total.add(b4_triangular(p2, pre1, n).negated());
    double norm = 2.0 * M_PI * std::pow(1.0 - spec.tau, 1.5) * std::sqrt(1.0 + spec.tau);
    return total.result().scaled(-std::log(norm)).value();
}

complex kernel_b4(complex z1, complex z2, const EnsembleSpec& spec) {
    complex khat = prekernel_b4(z1, z2, spec);
    double y1 = z1.imag(), y2 = z2.imag();
    double lw = 0.5 * (log_weight(4, z1, spec.tau) + log_weight(4, z2, spec.tau));
    return complex{0.0, -2.0} * std::sqrt(std::abs(y1 * y2)) * std::exp(lw) * khat;
}

complex prekernel_b1(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("prekernel_b1: beta must be 1");
    int n = spec.n;
    auto p1 = scaled_hermite_p_sequence(n - 1, z1, spec.tau);
    auto p2 = scaled_hermite_p_sequence(n - 1, z2, spec.tau);
    ScaledSum sum;
    for (int j = 0; j <= n - 2; ++j) {
        double lf = sf::log_factorial(j);
        sum.add((p1[j + 1] * p2[j]).scaled(-lf));
        sum.add((p2[j + 1] * p1[j]).scaled(-lf).negated());
    }
    double norm = 2.0 * std::sqrt(2.0 * M_PI) * (1.0 + spec.tau);
    return sum.result().scaled(-std::log(norm)).value();
}

namespace {

// Parity reduces I_j to a single-sided integral of w^{(1)}(t) p_j(t)/(j-1)!!:
// even j over [0, x], odd j over [x, inf).  These forms have no subtractive
// cancellation and back up the telescoped closed forms once those start
// losing digits (which happens for even j at small tau).
LogScaledValue i_tilde_quadrature(int j, double x, double tau) {
    double ldf = sf::log_double_factorial(j - 1);
    auto log_f = [&](double t) {
        LogScaledValue p = sf::scaled_hermite_p(j, {t, 0.0}, tau);
        if (p.zero_flag) return std::pair<double, double>(-1e308, 1.0);
        double lg = p.log_magnitude - ldf - t * t / (2.0 * (1.0 + tau));
        return std::pair<double, double>(lg, p.phase.real() < 0.0 ? -1.0 : 1.0);
    };

    double lo, hi;
    if (j % 2 == 0) {
        lo = std::min(0.0, x);
        hi = std::max(0.0, x);
    } else {
        lo = x;
        // the integrand peaks near sqrt(j(1+tau)) and is Gaussian beyond
        hi = std::max(x, std::sqrt(j * (1.0 + tau))) + 15.0 * std::sqrt(1.0 + tau);
    }
    if (lo == hi) return LogScaledValue::zero();

    // factor out the peak exponent so the adaptive pass works near O(1)
    double peak = -1e308;
    for (int i = 0; i <= 64; ++i) {
        auto [lg, sgn_unused] = log_f(lo + (hi - lo) * i / 64.0);
        (void)sgn_unused;
        peak = std::max(peak, lg);
    }
    if (peak < -1e307) return LogScaledValue::zero();

    qd::QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-14;
    spec.max_panels = 4000 + j;
    qd::Integral r = qd::integrate(
        [&](double t) {
            auto [lg, sign] = log_f(t);
            double v = (lg - peak < -745.0) ? 0.0 : std::exp(lg - peak);
            return complex{sign * v, 0.0};
        },
        lo, hi, spec);

    double base = r.value.real();
    // even j: I_j = 2 int_0^x;  odd j: I_j = -2 int_x^inf; the [lo,hi]
    // orientation already encodes the sign of x for even j
    double front = (j % 2 == 0) ? ((x >= 0.0) ? 2.0 : -2.0) : -2.0;
    return LogScaledValue::from(complex(front * base, 0.0)).scaled(peak + ldf);
}

} // namespace

LogScaledValue i_tilde(int j, double x, double tau) {
    if (j < 0 || j > 2000) throw std::domain_error("i_tilde: j outside [0, 2000]");
    if (!(tau > 0.0) || tau >= 1.0) throw std::domain_error("i_tilde: tau must lie in (0, 1)");
    double lw1 = -x * x / (2.0 * (1.0 + tau)); // log w^{(1)}(x) on the real axis

    if (j == 0) {
        double i0 = std::sqrt(2.0 * M_PI * (1.0 + tau)) *
                    std::erf(x / std::sqrt(2.0 * (1.0 + tau)));
        return LogScaledValue::from({i0, 0.0});
    }

    auto p = scaled_hermite_p_sequence(j - 1, {x, 0.0}, tau);
    ParityPrefix pre = parity_prefix_sums(p);
    double ldf = sf::log_double_factorial(j - 1);
    constexpr double kMaxCancellation = 4.6; // ~2 digits; beyond that the
                                             // telescoped form is re-done by
                                             // one-sided quadrature

    if (j % 2 == 1) {
        // I_j = -2(1+tau) (2/tau)^{j/2} (j-1)!! w(x) sum_{2k <= j-1} p_{2k}/(2k)!!
        LogScaledValue s = pre.even[j - 1];
        if (!s.zero_flag && pre.peak_even[j - 1] - s.log_magnitude < kMaxCancellation)
            return s.scaled(std::log(2.0 * (1.0 + tau)) + lw1 + ldf).negated();
        return i_tilde_quadrature(j, x, tau);
    }
    // I_j = (2/tau)^{j/2} (j-1)!! { I_0 - 2(1+tau) w(x) sum_{2k+1 <= j-1} p_{2k+1}/(2k+1)!! }
    double i0 = std::sqrt(2.0 * M_PI * (1.0 + tau)) * std::erf(x / std::sqrt(2.0 * (1.0 + tau)));
    ScaledSum braces;
    braces.add(complex(i0, 0.0));
    braces.add(pre.odd[j - 1].scaled(std::log(2.0 * (1.0 + tau)) + lw1).negated());
    LogScaledValue b = braces.result();
    double inner_lost = pre.odd[j - 1].zero_flag
                            ? 0.0
                            : pre.peak_odd[j - 1] - pre.odd[j - 1].log_magnitude;
    if (!b.zero_flag &&
        std::max(braces.peak_log() - b.log_magnitude, inner_lost) < kMaxCancellation)
        return b.scaled(ldf);
    return i_tilde_quadrature(j, x, tau);
}

double i_j(double x, double tau, int j) {
    LogScaledValue t = i_tilde(j, x, tau);
    // undo the (tau/2)^{j/2} normalisation
    return t.scaled(0.5 * j * std::log(2.0 / tau)).value().real();
}

namespace {

// both finite-N G^R paths need -G^R/w1(x2) as a log-scaled value
LogScaledValue neg_g_real_over_w(complex z1, double x2, const EnsembleSpec& spec,
                                 bool direct_sum) {
    int n = spec.n;
    double tau = spec.tau;
    if (direct_sum) {
        auto p1 = scaled_hermite_p_sequence(n - 1, z1, tau);
        ScaledSum sum;
        for (int j = 0; j <= n - 2; ++j) {
            double lf = sf::log_factorial(j);
            sum.add((p1[j + 1] * i_tilde(j, x2, tau)).scaled(-lf));
            sum.add((p1[j] * i_tilde(j + 1, x2, tau)).scaled(-lf).negated());
        }
        return sum.result().scaled(-std::log(2.0 * std::sqrt(2.0 * M_PI) * (1.0 + tau)));
    }

    // relation through the beta = 2 pre-kernel (the w1(z1)/E(y1) factors of
    // the published form cancel against the kernel weights):
    //   -G^R/w1(x2) = sqrt(pi(1-tau^2)/2) sqrt(w2(x2)) Khat_N^{(2)}(z1, x2)
    //                 + p_{N-1}(z1) Itilde_N(x2) / (2 sqrt(2 pi) (1+tau) (N-2)!!)
    ScaledSum sum;
    double lpref =
        0.5 * std::log(M_PI * (1.0 - tau * tau) / 2.0) + 0.5 * log_weight(2, {x2, 0.0}, tau);
    sum.add(prekernel_b2_scaled(z1, {x2, 0.0}, n, tau).scaled(lpref));

    // Itilde_N carries its (N-1)!! internally, so the full (N-1)! divides here
    LogScaledValue t2 = sf::scaled_hermite_p(n - 1, z1, tau) * i_tilde(n, x2, tau);
    sum.add(t2.scaled(-std::log(2.0 * std::sqrt(2.0 * M_PI) * (1.0 + tau)) -
                      sf::log_factorial(n - 1)));
    return sum.result();
}

} // namespace

complex g_real_b1(complex z1, double x2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("g_real_b1: beta must be 1");
    LogScaledValue v = neg_g_real_over_w(z1, x2, spec, /*direct_sum=*/false);
    return -v.scaled(log_weight(1, {x2, 0.0}, spec.tau)).value();
}

complex g_real_b1_direct(complex z1, double x2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("g_real_b1_direct: beta must be 1");
    LogScaledValue v = neg_g_real_over_w(z1, x2, spec, /*direct_sum=*/true);
    return -v.scaled(log_weight(1, {x2, 0.0}, spec.tau)).value();
}

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// w1(z) w1(z*) in log form (equal moduli; the erfc factor appears squared)
double log_w1_pair(complex z, double tau) { return 2.0 * log_weight(1, z, tau); }

} // namespace

complex g_complex_b1(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("g_complex_b1: beta must be 1");
    double s = sgn(z2.imag());
    if (s == 0.0) return {0.0, 0.0};
    complex khat = prekernel_b1(z1, std::conj(z2), spec);
    return complex{0.0, 2.0} * s * std::exp(log_w1_pair(z2, spec.tau)) * khat;
}

double w_rr_b1(double x1, double x2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("w_rr_b1: beta must be 1");
    int n = spec.n;
    double tau = spec.tau;
    auto p2 = scaled_hermite_p_sequence(n - 1, {x2, 0.0}, tau);
    double lw2 = log_weight(1, {x2, 0.0}, tau); // the Hermite sum descends from
                                                // the weighted kernel, the I*I
                                                // tail does not
    ScaledSum sum;
    for (int j = 0; j < n; ++j) {
        LogScaledValue t = i_tilde(j, x1, tau) * p2[j];
        sum.add(t.scaled(lw2 - sf::log_factorial(j)));
    }
    LogScaledValue tail = i_tilde(n - 1, x1, tau) * i_tilde(n, x2, tau);
    sum.add(tail.scaled(-std::log(2.0 * (1.0 + tau)) - sf::log_factorial(n - 1)));
    double lw = log_weight(1, {x1, 0.0}, tau) + lw2 - 0.5 * std::log(2.0 * M_PI);
    return -sum.result().scaled(lw).value().real();
}

complex w_rc_b1(double x1, complex z2, const EnsembleSpec& spec) {
    double s = sgn(z2.imag());
    if (s == 0.0) return {0.0, 0.0};
    LogScaledValue g = neg_g_real_over_w(std::conj(z2), x1, spec, false);
    // G^R(z2*, x1) = -w1(x1) * (that); W^RC = -2i sgn(y2) w1(z2) w1(z2*) G^R(z2*, x1)
    complex gr = -g.scaled(log_weight(1, {x1, 0.0}, spec.tau)).value();
    return complex{0.0, -2.0} * s * std::exp(log_w1_pair(z2, spec.tau)) * gr;
}

complex w_cc_b1(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("w_cc_b1: beta must be 1");
    double s1 = sgn(z1.imag()), s2 = sgn(z2.imag());
    if (s1 == 0.0 || s2 == 0.0) return {0.0, 0.0};
    complex khat = prekernel_b1(std::conj(z1), std::conj(z2), spec);
    double lw = log_w1_pair(z1, spec.tau) + log_w1_pair(z2, spec.tau);
    return 4.0 * s1 * s2 * std::exp(lw) * khat;
}

MatrixKernelB1 matrix_kernel_b1(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 1) throw std::domain_error("matrix_kernel_b1: beta must be 1");
    MatrixKernelB1 out;
    out.khat = prekernel_b1(z1, z2, spec);
    out.g_real = g_real_b1(z1, z2.real(), spec);
    out.g_complex = g_complex_b1(z1, z2, spec);
    out.w_rr = w_rr_b1(z1.real(), z2.real(), spec);
    out.w_rc_1 = w_rc_b1(z1.real(), z2, spec);
    out.w_rc_2 = w_rc_b1(z2.real(), z1, spec);
    out.w_cc = w_cc_b1(z1, z2, spec);
    return out;
}

MatrixKernelB4 matrix_kernel_b4(complex z1, complex z2, const EnsembleSpec& spec) {
    spec.validate();
    if (spec.beta != 4) throw std::domain_error("matrix_kernel_b4: beta must be 4");
    double y1 = z1.imag(), y2 = z2.imag();
    complex pref = complex{0.0, -2.0} * std::sqrt(std::abs(y1 * y2)) *
                   std::exp(0.5 * (log_weight(4, z1, spec.tau) + log_weight(4, z2, spec.tau)));
    MatrixKernelB4 out;
    out.k11 = pref * prekernel_b4(z1, z2, spec);
    out.k12 = pref * prekernel_b4(z1, std::conj(z2), spec);
    out.k21 = pref * prekernel_b4(std::conj(z1), z2, spec);
    out.k22 = pref * prekernel_b4(std::conj(z1), std::conj(z2), spec);
    return out;
}

namespace {

complex det_small(std::vector<complex>& m, int k) {
    // in-place LU with partial pivoting; k <= 4
    complex det = {1.0, 0.0};
    for (int c = 0; c < k; ++c) {
        int p = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(m[r * k + c]) > std::abs(m[p * k + c])) p = r;
        if (p != c) {
            for (int j = 0; j < k; ++j) std::swap(m[c * k + j], m[p * k + j]);
            det = -det;
        }
        if (m[c * k + c] == complex{0.0, 0.0}) return {0.0, 0.0};
        det *= m[c * k + c];
        for (int r = c + 1; r < k; ++r) {
            complex f = m[r * k + c] / m[c * k + c];
            for (int j = c; j < k; ++j) m[r * k + j] -= f * m[c * k + j];
        }
    }
    return det;
}

double as_real(complex v, double scale, const char* who) {
    if (std::abs(v.imag()) > 1e-8 * std::max(scale, std::abs(v.real())) + 1e-12)
        throw convergence_error(std::string(who) + ": imaginary residue too large");
    return v.real();
}

} // namespace

double correlations(std::span<const complex> points, const EnsembleSpec& spec) {
    spec.validate();
    int k = static_cast<int>(points.size());
    if (k < 1 || k > 4) throw std::domain_error("correlations: need 1 <= k <= 4 points");

    if (spec.beta == 2) {
        std::vector<complex> m(k * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                m[i * k + j] = kernel_b2(points[i], std::conj(points[j]), spec);
        double scale = 0.0;
        for (const complex& v : m) scale = std::max(scale, std::abs(v));
        complex d = det_small(m, k);
        return as_real(d, std::pow(scale, k), "correlations");
    }

    // Pfaffian structure for beta = 1, 4
    int dim = 2 * k;
    std::vector<complex> m(dim * dim, complex{0.0, 0.0});
    auto put = [&](int r, int c, complex v) {
        m[r * dim + c] = v;
        m[c * dim + r] = -v;
    };

    if (spec.beta == 4) {
        // the symmetric matrix-kernel form assumes upper-half-plane
        // representatives; densities are symmetric under conjugation
        std::vector<complex> up(points.begin(), points.end());
        for (complex& z : up)
            if (z.imag() < 0.0) z = std::conj(z);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                MatrixKernelB4 b = matrix_kernel_b4(up[i], up[j], spec);
                if (j > i) {
                    put(2 * i, 2 * j, b.k11);
                    put(2 * i, 2 * j + 1, b.k12);
                    put(2 * i + 1, 2 * j, b.k21);
                    put(2 * i + 1, 2 * j + 1, b.k22);
                } else {
                    put(2 * i, 2 * i + 1, b.k12);
                }
            }
    } else {
        auto g_entry = [&](complex zi, complex zj) -> complex {
            return (zj.imag() == 0.0) ? g_real_b1(zi, zj.real(), spec)
                                      : g_complex_b1(zi, zj, spec);
        };
        auto w_entry = [&](complex zi, complex zj) -> complex {
            bool ri = zi.imag() == 0.0, rj = zj.imag() == 0.0;
            if (ri && rj) return {w_rr_b1(zi.real(), zj.real(), spec), 0.0};
            if (ri && !rj) return w_rc_b1(zi.real(), zj, spec);
            if (!ri && rj) return -w_rc_b1(zj.real(), zi, spec);
            return w_cc_b1(zi, zj, spec);
        };
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                put(2 * i, 2 * j, prekernel_b1(points[i], points[j], spec));
                put(2 * i, 2 * j + 1, -g_entry(points[i], points[j]));
                put(2 * i + 1, 2 * j, g_entry(points[j], points[i]));
                put(2 * i + 1, 2 * j + 1, -w_entry(points[i], points[j]));
            }
            put(2 * i, 2 * i + 1, -g_entry(points[i], points[i]));
        }
    }

    double scale = 0.0;
    for (const complex& v : m) scale = std::max(scale, std::abs(v));
    complex pf = sf::pfaffian(m, dim);
    return as_real(pf, std::pow(std::max(scale, 1e-30), k), "correlations");
}

} // namespace gek::finite_n
