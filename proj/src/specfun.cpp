#include "gek/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gek/errors.hpp"

namespace gek::specfun {

namespace {

using detail::cdd;
using detail::dd;

// Ai(0) = 3^{-2/3}/Gamma(2/3) and Ai'(0) = -3^{-1/3}/Gamma(1/3) as hi/lo
// double-double pairs; the final c1*f - c2*g combination cancels to
// e^{-(4/3)|z|^{3/2}} of the partial sums and must stay in extended precision.
constexpr detail::dd kAiZero = {0.35502805388781722, 2.0523363243621199e-17};
constexpr detail::dd kAipZero = {-0.25881940379280682, 2.5222431116108321e-17};
constexpr double kSeriesRadius = 8.5;
constexpr double kTwoSqrtPi = 3.5449077018110320546; // 2*sqrt(pi)

void require_finite(complex z, const char* who) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error(std::string(who) + ": non-finite argument");
}

// Maclaurin series for Ai and Ai' in double-double arithmetic.  The four
// auxiliary sums share the term recurrences
//   f_{k+1} = f_k z^3 / ((3k+2)(3k+3)),   g_{k+1} = g_k z^3 / ((3k+3)(3k+4)),
// and their derivatives.
struct AiSeriesResult {
    complex ai, aip;
};

AiSeriesResult airy_series(complex z) {
    cdd zd = detail::cdd_from(z);
    cdd z2 = detail::mul(zd, zd); // cube formed in dd: a plain-double z^3
    cdd z3 = detail::mul(z2, zd); // perturbs f and g incoherently and the
                                  // eps-level error survives the cancellation
    cdd f = detail::cdd_from({1.0, 0.0});       // sum for f(z)
    cdd g = zd;                                 // sum for g(z)
    cdd fp = detail::cdd_from({0.0, 0.0});      // f'(z)
    cdd gp = detail::cdd_from({1.0, 0.0});      // g'(z)

    cdd ft = f, gt = g;
    cdd fpt = detail::div(z2, 2.0), gpt = gp;
    fp = detail::add(fp, fpt);

    for (int k = 0; k < 200; ++k) {
        double k3 = 3.0 * k;
        ft = detail::div(detail::mul(ft, z3), (k3 + 2.0) * (k3 + 3.0));
        gt = detail::div(detail::mul(gt, z3), (k3 + 3.0) * (k3 + 4.0));
        f = detail::add(f, ft);
        g = detail::add(g, gt);
        // fp terms: first term (k=1 in the derivative sum) was seeded above
        if (k >= 1) {
            fpt = detail::div(detail::mul(fpt, z3), k3 * (k3 + 2.0));
            fp = detail::add(fp, fpt);
        }
        gpt = detail::div(detail::mul(gpt, z3), (k3 + 1.0) * (k3 + 3.0));
        gp = detail::add(gp, gpt);

        double scale = std::max({detail::abs2_hi(f), detail::abs2_hi(g),
                                 detail::abs2_hi(fp), detail::abs2_hi(gp), 1.0});
        double tail = std::max({detail::abs2_hi(ft), detail::abs2_hi(gt),
                                detail::abs2_hi(fpt), detail::abs2_hi(gpt)});
        if (tail < 1e-80 * scale) break;
    }

    auto combine = [](const cdd& u, const cdd& v) {
        cdd r = {detail::add(detail::mul(u.re, kAiZero), detail::mul(v.re, kAipZero)),
                 detail::add(detail::mul(u.im, kAiZero), detail::mul(v.im, kAipZero))};
        return detail::to_complex(r);
    };
    return {combine(f, g), combine(fp, gp)};
}

// Asymptotic expansion, valid for |arg z| <= 2pi/3.  Returns log-scaled
// values so callers never see the e^{-zeta} underflow.
struct AiAsymResult {
    LogScaledValue ai, aip;
};

AiAsymResult airy_asymptotic_direct(complex z) {
    complex lz = std::log(z);
    complex zeta = (2.0 / 3.0) * std::exp(1.5 * lz);
    complex izeta = 1.0 / zeta;

    complex su = {1.0, 0.0}, sv = {1.0, 0.0};
    complex tu = {1.0, 0.0};
    double uk = 1.0;
    complex pw = {1.0, 0.0};
    double prev = 1e300;
    for (int k = 0; k < 120; ++k) {
        double k6 = 6.0 * k;
        double ratio = (k6 + 1.0) * (k6 + 3.0) * (k6 + 5.0) /
                       (216.0 * (k + 1.0) * (2.0 * k + 1.0));
        uk *= ratio;
        pw *= -izeta;
        tu = uk * pw;
        double mag = std::abs(tu);
        if (mag > prev) break; // divergent tail reached; stop at smallest term
        prev = mag;
        su += tu;
        double vk = uk * (k6 + 7.0) / (-k6 - 5.0); // v_{k+1} from u_{k+1}
        sv += vk * pw;
        if (mag < 1e-18 * std::abs(su)) break;
    }

    complex log_ai = -zeta + std::log(su) - 0.25 * lz - std::log(complex(kTwoSqrtPi, 0.0));
    complex log_aip = -zeta + std::log(sv) + 0.25 * lz - std::log(complex(kTwoSqrtPi, 0.0));
    LogScaledValue ai = LogScaledValue::from_log(
        log_ai.real(), std::exp(complex(0.0, log_ai.imag())));
    LogScaledValue aip = LogScaledValue::from_log(
        log_aip.real(), -std::exp(complex(0.0, log_aip.imag())));
    return {ai, aip};
}

AiAsymResult airy_asymptotic(complex z) {
    constexpr double kSectorLimit = 2.0943951023931954923; // 2*pi/3
    double th = std::arg(z);
    if (std::abs(th) <= kSectorLimit) return airy_asymptotic_direct(z);

    // rotate into the good sector: Ai(z) = -[w Ai(wz) + w* Ai(w*z)],
    // Ai'(z) = -[w^2 Ai'(wz) + w*^2 Ai'(w*z)], w = exp(2 pi i / 3)
    const complex w = std::polar(1.0, kSectorLimit);
    const complex wb = std::conj(w);
    AiAsymResult a = airy_asymptotic_direct(z * w);
    AiAsymResult b = airy_asymptotic_direct(z * wb);

    ScaledSum sai;
    sai.add(LogScaledValue::from_log(a.ai.log_magnitude, -w * a.ai.phase));
    sai.add(LogScaledValue::from_log(b.ai.log_magnitude, -wb * b.ai.phase));
    ScaledSum saip;
    saip.add(LogScaledValue::from_log(a.aip.log_magnitude, -w * w * a.aip.phase));
    saip.add(LogScaledValue::from_log(b.aip.log_magnitude, -wb * wb * b.aip.phase));
    return {sai.result(), saip.result()};
}

struct AiPair {
    LogScaledValue ai, aip;
};

AiPair airy_both_ln(complex z, const char* who, bool enforce_cap = true) {
    require_finite(z, who);
    // public contract is |z| <= 1e4; the deformed-Airy path goes far beyond
    // (argument sigma^4/4) where the asymptotic expansion only gets better
    if (enforce_cap && std::abs(z) > 1e4)
        throw std::domain_error(std::string(who) + ": |z| exceeds 1e4");
    AiPair out;
    if (std::abs(z) <= kSeriesRadius) {
        AiSeriesResult s = airy_series(z);
        out.ai = LogScaledValue::from(s.ai);
        out.aip = LogScaledValue::from(s.aip);
    } else {
        AiAsymResult a = airy_asymptotic(z);
        out.ai = a.ai;
        out.aip = a.aip;
    }
    if (z.imag() == 0.0) {
        // Ai is real on the real axis; the rotated-sector path leaves
        // O(eps) phase residue which we project away.
        auto realign = [](LogScaledValue& v) {
            if (!v.zero_flag) v.phase = complex(v.phase.real() < 0.0 ? -1.0 : 1.0, 0.0);
        };
        realign(out.ai);
        realign(out.aip);
    }
    return out;
}

} // namespace

complex airy_ai(complex z) { return airy_both_ln(z, "airy_ai").ai.value(); }

complex airy_ai_prime(complex z) { return airy_both_ln(z, "airy_ai_prime").aip.value(); }

LogScaledValue airy_ai_ln(complex z) { return airy_both_ln(z, "airy_ai_ln").ai; }

LogScaledValue airy_ai_prime_ln(complex z) { return airy_both_ln(z, "airy_ai_prime_ln").aip; }

namespace {

complex erfc_series(complex z) {
    // erfc(z) = 1 - (2/sqrt(pi)) sum_k (-1)^k z^{2k+1} / (k! (2k+1))
    complex z2 = z * z;
    complex term = z;
    complex sum = z;
    for (int k = 1; k < 400; ++k) {
        term *= -z2 / static_cast<double>(k);
        complex add = term / (2.0 * k + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return 1.0 - (2.0 / std::sqrt(M_PI)) * sum;
}

complex erfc_continued_fraction(complex z) {
    // erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    // evaluated with the modified Lentz algorithm; Re z > 0.
    const double tiny = 1e-290;
    complex f = z, c = z, d = 0.0;
    for (int n = 1; n < 400; ++n) {
        double a = 0.5 * n;
        d = z + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = z + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        complex delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z * z) / std::sqrt(M_PI) / f;
}

} // namespace

complex erfc(complex z) {
    require_finite(z, "erfc");
    if (z.imag() == 0.0) return {std::erfc(z.real()), 0.0};
    if (z.real() < 0.0) return 2.0 - erfc(-z);
    if (z.real() >= 2.2 || std::abs(z) > 5.5) return erfc_continued_fraction(z);
    return erfc_series(z);
}

complex erf(complex z) { return 1.0 - erfc(z); }

LogScaledValue hermite_h(unsigned n, complex z) {
    require_finite(z, "hermite_h");
    if (n > 1000000u) throw std::domain_error("hermite_h: degree exceeds 1e6");
    if (n == 0) return LogScaledValue::from({1.0, 0.0});

    constexpr double kRescaleAt = 5.2e150; // ~2^500
    constexpr double kRescale = 7.458340731200207e-155;
    constexpr double kLogRescale = 354.89135644669199; // -log(kRescale)

    complex prev = {1.0, 0.0};
    complex cur = 2.0 * z;
    double log_scale = 0.0;
    for (unsigned k = 1; k < n; ++k) {
        complex next = 2.0 * z * cur - 2.0 * static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
        double m = std::max(std::abs(cur.real()) + std::abs(cur.imag()),
                            std::abs(prev.real()) + std::abs(prev.imag()));
        if (m > kRescaleAt) {
            cur *= kRescale;
            prev *= kRescale;
            log_scale += kLogRescale;
        }
    }
    LogScaledValue out = LogScaledValue::from(cur);
    if (out.zero_flag) return out;
    return out.scaled(log_scale);
}

std::vector<LogScaledValue> scaled_hermite_p_sequence(unsigned jmax, complex z, double tau) {
    require_finite(z, "scaled_hermite_p");
    if (tau < 0.0 || tau >= 1.0)
        throw std::domain_error("scaled_hermite_p: tau outside [0,1)");

    constexpr double kRescaleAt = 5.2e150;
    constexpr double kRescale = 7.458340731200207e-155;
    constexpr double kLogRescale = 354.89135644669199;

    std::vector<LogScaledValue> out(jmax + 1);
    complex prev = {1.0, 0.0};
    complex cur = z;
    double log_scale = 0.0;
    out[0] = LogScaledValue::from(prev);
    if (jmax == 0) return out;
    out[1] = LogScaledValue::from(cur);
    for (unsigned j = 1; j < jmax; ++j) {
        complex next = z * cur - tau * static_cast<double>(j) * prev;
        prev = cur;
        cur = next;
        double m = std::max(std::abs(cur.real()) + std::abs(cur.imag()),
                            std::abs(prev.real()) + std::abs(prev.imag()));
        if (m > kRescaleAt) {
            cur *= kRescale;
            prev *= kRescale;
            log_scale += kLogRescale;
        }
        LogScaledValue v = LogScaledValue::from(cur);
        out[j + 1] = v.zero_flag ? v : v.scaled(log_scale);
    }
    return out;
}

LogScaledValue scaled_hermite_p(unsigned j, complex z, double tau) {
    require_finite(z, "scaled_hermite_p");
    if (tau < 0.0 || tau >= 1.0)
        throw std::domain_error("scaled_hermite_p: tau outside [0,1)");
    if (j == 0) return LogScaledValue::from({1.0, 0.0});

    constexpr double kRescaleAt = 5.2e150;
    constexpr double kRescale = 7.458340731200207e-155;
    constexpr double kLogRescale = 354.89135644669199;

    complex prev = {1.0, 0.0};
    complex cur = z;
    double log_scale = 0.0;
    for (unsigned k = 1; k < j; ++k) {
        complex next = z * cur - tau * static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
        double m = std::max(std::abs(cur.real()) + std::abs(cur.imag()),
                            std::abs(prev.real()) + std::abs(prev.imag()));
        if (m > kRescaleAt) {
            cur *= kRescale;
            prev *= kRescale;
            log_scale += kLogRescale;
        }
    }
    LogScaledValue out = LogScaledValue::from(cur);
    return out.zero_flag ? out : out.scaled(log_scale);
}

complex deformed_airy(complex Z, double sigma) {
    LogScaledValue v = deformed_airy_ln(Z, sigma);
    if (v.zero_flag) return {0.0, 0.0};
    if (v.log_magnitude > 709.0)
        throw std::range_error("deformed_airy: exponential prefactor overflows double range");
    return v.value();
}

LogScaledValue deformed_airy_ln(complex Z, double sigma) {
    require_finite(Z, "deformed_airy");
    if (sigma < 0.0) throw std::domain_error("deformed_airy: sigma must be >= 0");
    double s2 = sigma * sigma;
    double s4 = s2 * s2;
    LogScaledValue ai = airy_both_ln(Z + 0.25 * s4, "deformed_airy", false).ai;
    if (ai.zero_flag) return ai;
    double log_mag = s4 * s2 / 12.0 + 0.5 * s2 * Z.real() + ai.log_magnitude;
    complex phase = ai.phase * std::exp(complex(0.0, 0.5 * s2 * Z.imag()));
    return LogScaledValue::from_log(log_mag, phase);
}

namespace {

complex pfaffian_recurse(std::span<const complex> a, size_t n, const std::vector<int>& idx) {
    size_t m = idx.size();
    if (m == 0) return {1.0, 0.0};
    if (m == 2) return a[idx[0] * n + idx[1]];
    complex sum = {0.0, 0.0};
    int i0 = idx[0];
    double sign = 1.0;
    for (size_t j = 1; j < m; ++j) {
        complex aij = a[i0 * n + idx[j]];
        if (aij != complex(0.0, 0.0)) {
            std::vector<int> rest;
            rest.reserve(m - 2);
            for (size_t k = 1; k < m; ++k)
                if (k != j) rest.push_back(idx[k]);
            sum += sign * aij * pfaffian_recurse(a, n, rest);
        }
        sign = -sign;
    }
    return sum;
}

} // namespace

complex pfaffian(std::span<const complex> a, int dim) {
    if (dim < 0 || dim % 2 != 0 || dim > 12)
        throw structure_error("pfaffian: dimension must be even and <= 12");
    if (static_cast<size_t>(dim) * dim != a.size())
        throw structure_error("pfaffian: matrix size does not match dimension");
    double amax = 0.0, smax = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            amax = std::max(amax, std::abs(a[i * dim + j]));
            smax = std::max(smax, std::abs(a[i * dim + j] + a[j * dim + i]));
        }
    if (smax > 1e-10 * amax && amax > 0.0)
        throw structure_error("pfaffian: matrix is not antisymmetric");
    if (dim == 0) return {1.0, 0.0};

    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    return pfaffian_recurse(a, static_cast<size_t>(dim), idx);
}

double log_factorial(unsigned n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_double_factorial(unsigned n) {
    if (n <= 1) return 0.0; // covers 0!! and the (-1)!! convention at call sites
    if (n % 2 == 0) {
        double m = n / 2.0;
        return m * std::log(2.0) + std::lgamma(m + 1.0);
    }
    double m = (n - 1) / 2.0;
    return std::lgamma(static_cast<double>(n) + 1.0) - m * std::log(2.0) -
           std::lgamma(m + 1.0);
}

double log_erfc_real(double x) {
    if (x < 25.0) return std::log(std::erfc(x));
    // erfc(x) = e^{-x^2}/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...)
    double ix2 = 1.0 / (x * x);
    double series = 1.0 + ix2 * (-0.5 + ix2 * (0.75 - 1.875 * ix2));
    return -x * x - std::log(x * std::sqrt(M_PI)) + std::log(series);
}

} // namespace gek::specfun
