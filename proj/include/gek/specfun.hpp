#pragma once

#include <span>
#include <vector>

#include "gek/numeric.hpp"

namespace gek::specfun {

// Airy function Ai and its derivative for complex argument.
// Maclaurin series (double-double accumulation) inside |z| <= 8.5,
// asymptotic expansions with sector rotation outside.  Requires |z| <= 1e4.
complex airy_ai(complex z);
complex airy_ai_prime(complex z);

// Log-scaled variants; these are what the kernel integrands consume, since
// Ai underflows double range already for real argument ~ 106.
LogScaledValue airy_ai_ln(complex z);
LogScaledValue airy_ai_prime_ln(complex z);

// Complementary error function for complex argument.  Maclaurin series for
// small |z|, Laplace continued fraction once Re z is large enough to make
// the series cancel badly; reflection for Re z < 0.
complex erfc(complex z);
complex erf(complex z);

// Physicists' Hermite polynomial H_n(z) by three-term recurrence, carried in
// log-magnitude/phase form.  n up to 10^6.
LogScaledValue hermite_h(unsigned n, complex z);

// p_j(z) = (tau/2)^{j/2} H_j(z / sqrt(2 tau)) -- the monic polynomial that
// every elliptic-ensemble kernel sums over.  Computed from the recurrence
// p_{j+1} = z p_j - tau j p_{j-1}, which is regular down to tau = 0 where
// p_j degenerates to z^j.
LogScaledValue scaled_hermite_p(unsigned j, complex z, double tau);

// all of p_0 ... p_jmax in one recurrence pass
std::vector<LogScaledValue> scaled_hermite_p_sequence(unsigned jmax, complex z, double tau);

// exp[sigma^6/12 + sigma^2 Z / 2] * Ai(Z + sigma^4/4).
complex deformed_airy(complex Z, double sigma);
LogScaledValue deformed_airy_ln(complex Z, double sigma);

// Pfaffian of an antisymmetric matrix (row-major, dim x dim, dim even <= 12)
// by cofactor expansion along the first row.
complex pfaffian(std::span<const complex> a, int dim);

double log_factorial(unsigned n);
double log_double_factorial(unsigned n); // n!!, with (-1)!! = 0!! = 1
double log_erfc_real(double x);          // log(erfc(x)) without underflow

} // namespace gek::specfun
