#pragma once

#include <functional>

#include "gek/numeric.hpp"

namespace gek::quad {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_panels = 4000;
    double truncation_point = 0.0; // 0 = derive from the certified tail bound

    void validate() const;
};

// Default spec; rel_tol can be overridden through GEK_QUAD_RTOL.
QuadratureSpec default_spec();

struct Integral {
    complex value;
    double error; // conservative estimate: sum of per-panel refinement gaps
};

using Integrand = std::function<complex(double)>;

// Adaptive composite 15-point Gauss-Legendre on the finite interval [a, b].
Integral integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec);

// Integral over [0, inf): adaptive panels on [0, T] where T either comes from
// spec.truncation_point or must be supplied by the caller via the tail-bound
// helpers below.  The integrand must be negligible past T.
Integral semiinfinite_integral(const Integrand& f, const QuadratureSpec& spec);

// Certified truncation points.  Both use |Ai(w)| <= exp(-0.59 Re(w)^{3/2})
// valid once Re(w) >= 1 + 3|Im(w)|, so the returned T satisfies
//   integral_T^inf exp(log_prefactor + rate t) |Ai...| dt <= abs_tol.
double airy_product_truncation(complex z1, complex z2, double shift, double rate,
                               double log_prefactor, double abs_tol);
double airy_single_truncation(complex z, double shift, double rate,
                              double log_prefactor, double abs_tol);

// integral_0^inf e^{rate t} Ai(z1+shift+t) Ai(z2+shift+t) dt
complex exp_airy_product_integral(complex z1, complex z2, double shift, double rate,
                                  const QuadratureSpec& spec);

// integral_0^inf ds e^{rate s} Ai(z2+shift+s) integral_0^s dt e^{rate t} Ai(z1+shift+t)
complex nested_exp_airy_integral(complex z1, complex z2, double shift, double rate,
                                 const QuadratureSpec& spec);

// Ordered double integral of general integrands on [0, T]:
//   integral_0^T ds outer(s) * integral_0^s dt inner(t).
// The inner cumulative is built once on an adaptive grid and reused at every
// outer node, avoiding the quadratic re-evaluation cost.
Integral nested_semiinfinite(const Integrand& outer, const Integrand& inner,
                             const QuadratureSpec& spec);

} // namespace gek::quad
