#include "gek/quad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <vector>

#include "gek/errors.hpp"
#include "gek/specfun.hpp"

namespace gek::quad {

namespace {

struct NodeWeight {
    double x, w;
};

// 15-point Gauss-Legendre rule on [-1, 1]
constexpr NodeWeight kGL15[15] = {
    {-9.87992518020485377406e-01, 3.07532419961172691358e-02},
    {-9.37273392400705951388e-01, 7.03660474881081243748e-02},
    {-8.48206583410427206182e-01, 1.07159220467171939495e-01},
    {-7.24417731360170069621e-01, 1.39570677926154324000e-01},
    {-5.70972172608538830474e-01, 1.66269205816993920211e-01},
    {-3.94151347077563385390e-01, 1.86161000015562211329e-01},
    {-2.01194093997434514387e-01, 1.98431485327111578609e-01},
    {0.00000000000000000000e+00, 2.02578241925561286507e-01},
    {2.01194093997434514387e-01, 1.98431485327111578609e-01},
    {3.94151347077563385390e-01, 1.86161000015562211329e-01},
    {5.70972172608538830474e-01, 1.66269205816993920211e-01},
    {7.24417731360170069621e-01, 1.39570677926154324000e-01},
    {8.48206583410427206182e-01, 1.07159220467171939495e-01},
    {9.37273392400705951388e-01, 7.03660474881081243748e-02},
    {9.87992518020485377406e-01, 3.07532419961172691358e-02},
};

complex gl15(const Integrand& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    complex acc = {0.0, 0.0};
    for (const auto& nw : kGL15) acc += nw.w * f(c + h * nw.x);
    return h * acc;
}

struct Panel {
    double a, b;
    complex fine;   // sum of the two half-interval GL15s
    double err;     // |one-shot GL15 - fine|, a conservative refinement gauge

    static Panel make(const Integrand& f, double a, double b) {
        Panel p;
        p.a = a;
        p.b = b;
        complex coarse = gl15(f, a, b);
        double m = 0.5 * (a + b);
        p.fine = gl15(f, a, m) + gl15(f, m, b);
        p.err = std::abs(coarse - p.fine);
        return p;
    }
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

struct AdaptiveOut {
    complex value;
    double err;
    std::vector<Panel> leaves;
};

AdaptiveOut adaptive(const Integrand& f, std::vector<Panel> seed, const QuadratureSpec& spec,
                     bool keep_leaves = false) {
    complex total = {0.0, 0.0};
    double err = 0.0;
    for (const Panel& p : seed) {
        total += p.fine;
        err += p.err;
    }
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue(PanelWorse{},
                                                                     std::move(seed));
    int panels = static_cast<int>(queue.size());
    while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (panels >= spec.max_panels)
            throw convergence_error("quadrature: panel budget exhausted at error " +
                                    std::to_string(err));
        Panel worst = queue.top();
        if (worst.err <= 0.0) break; // flat to machine precision everywhere
        queue.pop();
        double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b)
            throw convergence_error("quadrature: interval too small to bisect");
        Panel l = Panel::make(f, worst.a, m);
        Panel r = Panel::make(f, m, worst.b);
        total += l.fine + r.fine - worst.fine;
        err += l.err + r.err - worst.err;
        err = std::max(err, 0.0);
        queue.push(l);
        queue.push(r);
        ++panels;
    }

    // exact drain: return sums recomputed from the surviving leaves
    AdaptiveOut out;
    out.value = {0.0, 0.0};
    out.err = 0.0;
    while (!queue.empty()) {
        const Panel& p = queue.top();
        out.value += p.fine;
        out.err += p.err;
        if (keep_leaves) out.leaves.push_back(p);
        queue.pop();
    }
    if (keep_leaves)
        std::sort(out.leaves.begin(), out.leaves.end(),
                  [](const Panel& x, const Panel& y) { return x.a < y.a; });
    return out;
}

std::vector<Panel> seed_panels(const Integrand& f, double a, double b) {
    // geometric seeding keeps a lone huge panel from self-certifying when the
    // integrand lives entirely near the left end
    std::vector<Panel> seed;
    double len = b - a;
    if (len <= 4.0) {
        seed.push_back(Panel::make(f, a, b));
        return seed;
    }
    double lo = a, hi = a + 1.0;
    while (lo < b) {
        seed.push_back(Panel::make(f, lo, std::min(hi, b)));
        double w = (hi - lo) * 2.0;
        lo = std::min(hi, b);
        hi = lo + w;
    }
    return seed;
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::domain_error("QuadratureSpec: tolerances must be positive");
    if (max_panels < 4) throw std::domain_error("QuadratureSpec: max_panels must be >= 4");
}

QuadratureSpec default_spec() {
    QuadratureSpec spec;
    if (const char* env = std::getenv("GEK_QUAD_RTOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0.0 && v < 1.0) spec.rel_tol = v;
    }
    return spec;
}

Integral integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (a == b) return {{0.0, 0.0}, 0.0};
    if (a > b) {
        Integral r = integrate(f, b, a, spec);
        return {-r.value, r.error};
    }
    AdaptiveOut out = adaptive(f, seed_panels(f, a, b), spec);
    return {out.value, out.err};
}

Integral semiinfinite_integral(const Integrand& f, const QuadratureSpec& spec) {
    spec.validate();
    double T = spec.truncation_point;
    if (!(T > 0.0))
        throw std::domain_error(
            "semiinfinite_integral: truncation_point must be set (use the tail-bound helpers)");
    AdaptiveOut out = adaptive(f, seed_panels(f, 0.0, T), spec);
    return {out.value, out.err};
}

namespace {

// decay exponent g(t) = 0.59 sum_i (u_i + t)^{3/2} - rate t - log_prefactor,
// valid beyond t0 where Re z_i + shift + t >= 1 + 3 |Im z_i|
struct TailModel {
    double u1, u2; // Re z_i + shift; u2 = NaN for the single-factor bound
    double rate, log_prefactor, t0;

    double g(double t) const {
        double s = std::pow(u1 + t, 1.5);
        if (!std::isnan(u2)) s += std::pow(u2 + t, 1.5);
        return 0.59 * s - rate * t - log_prefactor;
    }
    double gp(double t) const {
        double s = std::sqrt(u1 + t);
        if (!std::isnan(u2)) s += std::sqrt(u2 + t);
        return 0.885 * s - rate;
    }
};

double solve_truncation(const TailModel& m, double abs_tol) {
    if (!(abs_tol > 0.0)) throw std::domain_error("tail bound: abs_tol must be positive");
    double T = std::max(m.t0, 1.0);
    for (int i = 0; i < 200 && m.gp(T) <= 1.0; ++i) T *= 1.5;
    if (m.gp(T) <= 1.0) throw convergence_error("tail bound: decay never dominates rate");
    for (int i = 0; i < 400; ++i) {
        // tail <= exp(-g(T)) / g'(T)
        if (m.g(T) >= std::log(1.0 / (abs_tol * m.gp(T)))) return T;
        T *= 1.25;
        if (T > 1e9) break;
    }
    throw convergence_error("tail bound: not satisfiable within truncation limit");
}

double t_ok(complex z, double shift) {
    return std::max(0.0, 1.0 + 3.0 * std::abs(z.imag()) - z.real() - shift);
}

} // namespace

double airy_product_truncation(complex z1, complex z2, double shift, double rate,
                               double log_prefactor, double abs_tol) {
    TailModel m;
    m.u1 = z1.real() + shift;
    m.u2 = z2.real() + shift;
    m.rate = rate;
    m.log_prefactor = log_prefactor;
    m.t0 = std::max(t_ok(z1, shift), t_ok(z2, shift));
    return solve_truncation(m, abs_tol / 10.0);
}

double airy_single_truncation(complex z, double shift, double rate, double log_prefactor,
                              double abs_tol) {
    TailModel m;
    m.u1 = z.real() + shift;
    m.u2 = std::numeric_limits<double>::quiet_NaN();
    m.rate = rate;
    m.log_prefactor = log_prefactor;
    m.t0 = t_ok(z, shift);
    return solve_truncation(m, abs_tol / 10.0);
}

namespace {

complex exp_airy_factor(double t, complex z, double shift, double rate) {
    LogScaledValue a = specfun::airy_ai_ln(z + shift + t);
    if (a.zero_flag) return {0.0, 0.0};
    double lm = rate * t + a.log_magnitude;
    if (lm < -745.0) return {0.0, 0.0};
    return std::exp(lm) * a.phase;
}

} // namespace

complex exp_airy_product_integral(complex z1, complex z2, double shift, double rate,
                                  const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    if (!(s.truncation_point > 0.0))
        s.truncation_point = airy_product_truncation(z1, z2, shift, rate, 0.0, s.abs_tol);
    Integrand f = [=](double t) {
        LogScaledValue a1 = specfun::airy_ai_ln(z1 + shift + t);
        LogScaledValue a2 = specfun::airy_ai_ln(z2 + shift + t);
        if (a1.zero_flag || a2.zero_flag) return complex{0.0, 0.0};
        double lm = rate * t + a1.log_magnitude + a2.log_magnitude;
        if (lm < -745.0) return complex{0.0, 0.0};
        return std::exp(lm) * a1.phase * a2.phase;
    };
    return semiinfinite_integral(f, s).value;
}

Integral nested_semiinfinite(const Integrand& outer, const Integrand& inner,
                             const QuadratureSpec& spec) {
    spec.validate();
    double T = spec.truncation_point;
    if (!(T > 0.0))
        throw std::domain_error("nested_semiinfinite: truncation_point must be set");

    // Pass 1: adaptively panelise the inner integrand, keep its leaf grid,
    // and build the cumulative integral at the panel boundaries.
    AdaptiveOut in = adaptive(inner, seed_panels(inner, 0.0, T), spec, /*keep_leaves=*/true);
    const std::vector<Panel>& leaves = in.leaves;
    std::vector<double> lo(leaves.size());
    std::vector<complex> cum(leaves.size() + 1, complex{0.0, 0.0});
    for (size_t i = 0; i < leaves.size(); ++i) {
        lo[i] = leaves[i].a;
        cum[i + 1] = cum[i] + leaves[i].fine;
    }

    auto inner_cumulative = [&](double s) -> complex {
        // index of the leaf containing s
        auto it = std::upper_bound(lo.begin(), lo.end(), s);
        size_t i = (it == lo.begin()) ? 0 : static_cast<size_t>(it - lo.begin()) - 1;
        if (i >= leaves.size()) i = leaves.size() - 1;
        return cum[i] + gl15(inner, leaves[i].a, std::min(s, leaves[i].b));
    };

    // Pass 2: adaptive outer integral over outer(s) * cumulative(s).
    Integrand f = [&](double s) { return outer(s) * inner_cumulative(s); };
    AdaptiveOut out = adaptive(f, seed_panels(f, 0.0, T), spec);
    return {out.value, out.err + in.err * std::max(1.0, T)};
}

complex nested_exp_airy_integral(complex z1, complex z2, double shift, double rate,
                                 const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    if (!(s.truncation_point > 0.0)) {
        // log_prefactor 2 gives headroom for the saturated inner cumulative
        // multiplying the outer factor in the tail
        double t_in = airy_single_truncation(z1, shift, rate, 2.0, s.abs_tol);
        double t_out = airy_single_truncation(z2, shift, rate, 2.0, s.abs_tol);
        s.truncation_point = std::max(t_in, t_out);
    }
    Integrand inner = [=](double t) { return exp_airy_factor(t, z1, shift, rate); };
    Integrand outer = [=](double t) { return exp_airy_factor(t, z2, shift, rate); };
    return nested_semiinfinite(outer, inner, s).value;
}

} // namespace gek::quad
