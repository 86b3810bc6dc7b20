#pragma once

#include <span>
#include <vector>

#include "gek/numeric.hpp"

namespace gek::finite_n {

// beta = 1, 2, 4; n counts complex eigenvalues (so a beta = 4 ensemble of M
// quaternion eigenvalue pairs has n = 2M); tau in [0, 1).
struct EnsembleSpec {
    int beta = 2;
    int n = 2;
    double tau = 0.0;

    void validate() const;
};

// w^{(beta)}(z); beta = 2 and beta = 4 share the same weight, beta = 1
// carries the erfc(|y|)-type factor.
double weight(int beta, complex z, double tau);
double log_weight(int beta, complex z, double tau);

// beta = 2 kernel K_N(z1, z2) = sqrt(w(z1) w(z2)) sum_j p_j(z1) p_j(z2) / c_j.
// Arguments are NOT conjugated internally; the density is kernel_b2(z, conj z).
complex kernel_b2(complex z1, complex z2, const EnsembleSpec& spec);

// beta = 2 pre-kernel (no weight factors), needed by the finite-N identities
complex prekernel_b2(complex z1, complex z2, int n, double tau);

// beta = 4 antisymmetric pre-kernel over skew-orthogonal polynomial pairs
complex prekernel_b4(complex z1, complex z2, const EnsembleSpec& spec);

// K_n^{(4)}(z1, z2) = (-2i) sqrt(|y1 y2| w(z1) w(z2)) Khat_n^{(4)}(z1, z2)
complex kernel_b4(complex z1, complex z2, const EnsembleSpec& spec);

// beta = 1 antisymmetric pre-kernel (even n only)
complex prekernel_b1(complex z1, complex z2, const EnsembleSpec& spec);

// I_j(x; tau) = integral sgn(x-t) w^{(1)}(t) H_j(t/sqrt(2 tau)) dt in its
// closed form; i_tilde is the normalised variant (tau/2)^{j/2} I_j that the
// kernel sums actually consume (finite for every j).
double i_j(double x, double tau, int j);
LogScaledValue i_tilde(int j, double x, double tau);

// G_N^{R(1)}(z1, x2): via the finite-N relation to the beta = 2 kernel, and
// via the direct skew-orthogonal sum (the two must agree; both are exposed
// so the agreement is testable).
complex g_real_b1(complex z1, double x2, const EnsembleSpec& spec);
complex g_real_b1_direct(complex z1, double x2, const EnsembleSpec& spec);

complex g_complex_b1(complex z1, complex z2, const EnsembleSpec& spec);
double w_rr_b1(double x1, double x2, const EnsembleSpec& spec);
complex w_rc_b1(double x1, complex z2, const EnsembleSpec& spec);
complex w_cc_b1(complex z1, complex z2, const EnsembleSpec& spec);

// The split matrix-kernel for beta = 1.  Delta-function factors are purely
// structural: g_real multiplies delta(y2), w_rr multiplies delta(y1)delta(y2),
// w_rc_1 multiplies delta(y1), w_rc_2 enters negated and multiplies delta(y2).
// Contact terms (the F^{(1)} subtraction in W) are excluded; the flag records
// that choice for consumers that must add them back.
struct MatrixKernelB1 {
    complex khat;
    complex g_real;
    complex g_complex;
    double w_rr;
    complex w_rc_1;
    complex w_rc_2;
    complex w_cc;
    bool contact_terms_excluded = true;
};
MatrixKernelB1 matrix_kernel_b1(complex z1, complex z2, const EnsembleSpec& spec);

// The beta = 4 matrix-kernel in its symmetric form: all four entries are the
// same pre-kernel at conjugated argument pairs, sharing one scalar prefactor
// (-2i) sqrt(|y1 y2| w(z1) w(z2)).  Contact terms dropped.
struct MatrixKernelB4 {
    complex k11; // scaled Khat(z1,  z2)
    complex k12; // scaled Khat(z1,  z2*)
    complex k21; // scaled Khat(z1*, z2)
    complex k22; // scaled Khat(z1*, z2*)
};
MatrixKernelB4 matrix_kernel_b4(complex z1, complex z2, const EnsembleSpec& spec);

// k-point correlation function, k <= 4.  beta = 2: determinant of kernel
// values; beta = 1, 4: Pfaffian of the matrix-kernel.  For beta = 1, points
// with Im z = 0 exactly are treated as real-axis points and the returned
// density is delta-stripped (per unit length on the real axis, per unit area
// elsewhere); contact terms are excluded.
double correlations(std::span<const complex> points, const EnsembleSpec& spec);

} // namespace gek::finite_n
