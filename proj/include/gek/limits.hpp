#pragma once

#include "gek/numeric.hpp"
#include "gek/quad.hpp"

namespace gek::limits {

// Microscopic edge coordinate Z = X + iY together with the weak
// non-Hermiticity parameter sigma (N^{1/3}(1 - tau) -> sigma^2).
struct MicroscopicPoint {
    complex Z;
    double sigma = 1.0;
};

enum class LimitRegime { interpolating, hermitian, strong_edge, poisson, bulk };

// ---- interpolating (weakly non-Hermitian) edge kernels -------------------

// beta = 2 interpolating Airy kernel; density is kernel at (Z, conj Z).
complex kernel_ai_b2(complex Z1, complex Z2, double sigma,
                     quad::QuadratureSpec spec = quad::default_spec());
double density_ai_b2(complex Z, double sigma,
                     quad::QuadratureSpec spec = quad::default_spec());

// beta = 4: antisymmetrised nested-integral kernel and its density, plus the
// explicit Im-form of the density used as a cross-check.
complex kernel_ai_b4(complex Z1, complex Z2, double sigma,
                     quad::QuadratureSpec spec = quad::default_spec());
double density_ai_b4(complex Z, double sigma,
                     quad::QuadratureSpec spec = quad::default_spec());
double density_ai_b4_im_form(complex Z, double sigma,
                             quad::QuadratureSpec spec = quad::default_spec());

// beta = 1 weight-adjusted limit elements
complex prekernel_ai_b1(complex Z1, complex Z2, double sigma,
                        quad::QuadratureSpec spec = quad::default_spec());
double density_ai_complex_b1(complex Z, double sigma,
                             quad::QuadratureSpec spec = quad::default_spec());
// G^R_Ai(Z1, X2); the real-axis density is -G^R_Ai(X, X)
complex g_ai_real_b1(complex Z1, double X2, double sigma,
                     quad::QuadratureSpec spec = quad::default_spec());
double density_ai_real_b1(double X, double sigma,
                          quad::QuadratureSpec spec = quad::default_spec());
// W^{RR}_Ai(X1, X2) (antisymmetric)
double w_ai_rr_b1(double X1, double X2, double sigma,
                  quad::QuadratureSpec spec = quad::default_spec());
complex g_ai_complex_b1(complex Z1, complex Z2, double sigma,
                        quad::QuadratureSpec spec = quad::default_spec());

// shared building blocks (exposed for the oracle tests)
// integral_0^inf Aid(Z1 + t, sigma) Aid(Z2 + t, sigma) dt
complex aid_product_integral(complex Z1, complex Z2, double sigma,
                             quad::QuadratureSpec spec = quad::default_spec());
// e^{sigma^6/6 + sigma^2 (Z1+Z2)/2} integral_0^inf Ai(Z1+c+t) Ai(Z2+c+t) dt
complex aid_product_integral_rate0(complex Z1, complex Z2, double sigma,
                                   quad::QuadratureSpec spec = quad::default_spec());
// B(X) = integral_0^inf Aid(X + t, sigma) dt
complex aid_single_integral(complex X, double sigma,
                            quad::QuadratureSpec spec = quad::default_spec());
// A(X1, X2) = integral ds Aid(X1+s) integral_0^s dt Aid(X2+t)
complex aid_nested_integral(complex outer, complex inner, double sigma,
                            quad::QuadratureSpec spec = quad::default_spec());

// ---- Hermitian (sigma -> 0) closed forms ----------------------------------

// (Ai(X1)Ai'(X2) - Ai'(X1)Ai(X2))/(X1 - X2) with the confluent diagonal form
double hermitian_airy_kernel(double X1, double X2);
// integral representation, for the equality check
double hermitian_airy_kernel_integral(double X1, double X2,
                                      quad::QuadratureSpec spec = quad::default_spec());

struct HermitianElementsB4 {
    double t1, t2, t3, t4;
};
HermitianElementsB4 hermitian_elements_b4(double X1, double X2,
                                          quad::QuadratureSpec spec = quad::default_spec());

// the sigma -> 0 matrix-kernel elements; the three elements not listed
// (G^C, W^RC, W^CC limits) vanish identically
struct HermitianElementsB1 {
    double khat0, g0, wrr0;
    double gc0 = 0.0, wrc0 = 0.0, wcc0 = 0.0;
};
HermitianElementsB1 hermitian_elements_b1(double X1, double X2,
                                          quad::QuadratureSpec spec = quad::default_spec());

double hermitian_density_b2(double X);
double hermitian_density_b4(double X, quad::QuadratureSpec spec = quad::default_spec());
double hermitian_density_real_b1(double X, quad::QuadratureSpec spec = quad::default_spec());

// ---- strongly non-Hermitian edge (sigma -> inf, Zhat = Z / sigma) ---------

complex strong_edge_kernel_b2(complex Z1, complex Z2);
complex strong_edge_kernel_b4(complex Z1, complex Z2,
                              quad::QuadratureSpec spec = quad::default_spec());
double strong_edge_density_b2(complex Z);
double strong_edge_density_b4(complex Z, quad::QuadratureSpec spec = quad::default_spec());

struct StrongEdgeB1 {
    complex khat;
    complex g_real;    // G^R_edge(Z1, X2)
    complex g_complex; // G^C_edge(Z1, Z2)
    double w_rr;       // W^{RR}_edge(X1, X2)
    complex w_rc;      // W^{RC}_edge(X1, Z2)
    complex w_cc;
};
StrongEdgeB1 strong_edge_elements_b1(complex Z1, complex Z2,
                                     quad::QuadratureSpec spec = quad::default_spec());
double strong_edge_density_complex_b1(complex Z);
double strong_edge_density_real_b1(double X);

// ---- Poisson kernel at the largest real part ------------------------------

// Exact Kronecker-delta branch: nonzero only when y1 == -y2 bitwise; the
// delta is a statement about the limit structure, not a numeric threshold.
complex poisson_kernel(int beta, complex z1, complex z2);

// ---- weakly non-Hermitian bulk ---------------------------------------------

complex bulk_sine_kernel(complex z1, complex z2, double sigma,
                         quad::QuadratureSpec spec = quad::default_spec());

} // namespace gek::limits
