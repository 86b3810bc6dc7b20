#include "gek/limits.hpp"

#include <cmath>
#include <stdexcept>

#include "gek/errors.hpp"
#include "gek/specfun.hpp"

namespace gek::limits {

namespace sf = gek::specfun;
namespace qd = gek::quad;

namespace {

constexpr double kSigmaMax = 12.5;

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || sigma > kSigmaMax)
        throw std::domain_error("interpolating kernel: sigma must lie in (0, 12.5]");
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

complex aid(complex Z, double sigma) {
    LogScaledValue v = sf::deformed_airy_ln(Z, sigma);
    if (v.zero_flag || v.log_magnitude < -745.0) return {0.0, 0.0};
    return v.value();
}

// truncation for integral of Aid(Z1+t) Aid(Z2+t): the integrand equals
// exp[s6/6 + s2(Z1+Z2)/2] e^{s2 t} Ai(Z1+c+t) Ai(Z2+c+t)
double aid_product_T(complex Z1, complex Z2, double sigma, double abs_tol) {
    double s2 = sigma * sigma;
    double lp = s2 * s2 * s2 / 6.0 + 0.5 * s2 * (Z1.real() + Z2.real());
    return qd::airy_product_truncation(Z1, Z2, 0.25 * s2 * s2, s2, lp, abs_tol);
}

double aid_single_T(complex Z, double sigma, double abs_tol) {
    double s2 = sigma * sigma;
    double lp = s2 * s2 * s2 / 12.0 + 0.5 * s2 * Z.real();
    return qd::airy_single_truncation(Z, 0.25 * s2 * s2, 0.5 * s2, lp + 2.0, abs_tol);
}

} // namespace

complex aid_product_integral(complex Z1, complex Z2, double sigma, qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point = aid_product_T(Z1, Z2, sigma, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double t) { return aid(Z1 + t, sigma) * aid(Z2 + t, sigma); }, spec)
        .value;
}

complex aid_product_integral_rate0(complex Z1, complex Z2, double sigma,
                                   qd::QuadratureSpec spec) {
    double s2 = sigma * sigma;
    double c = 0.25 * s2 * s2;
    complex offset = s2 * s2 * s2 / 6.0 + 0.5 * s2 * (Z1 + Z2);
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point =
            qd::airy_product_truncation(Z1, Z2, c, 0.0, offset.real(), spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double t) {
                   LogScaledValue a1 = sf::airy_ai_ln(Z1 + c + t);
                   LogScaledValue a2 = sf::airy_ai_ln(Z2 + c + t);
                   if (a1.zero_flag || a2.zero_flag) return complex{0.0, 0.0};
                   complex lg = offset + a1.log_magnitude + a2.log_magnitude;
                   if (lg.real() < -745.0) return complex{0.0, 0.0};
                   return std::exp(lg.real()) * a1.phase * a2.phase *
                          std::exp(complex(0.0, lg.imag()));
               },
               spec)
        .value;
}

complex aid_single_integral(complex X, double sigma, qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point = aid_single_T(X, sigma, spec.abs_tol);
    return qd::semiinfinite_integral([=](double t) { return aid(X + t, sigma); }, spec).value;
}

complex aid_nested_integral(complex outer, complex inner, double sigma,
                            qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point = std::max(aid_single_T(outer, sigma, spec.abs_tol),
                                         aid_single_T(inner, sigma, spec.abs_tol));
    return qd::nested_semiinfinite([=](double s) { return aid(outer + s, sigma); },
                                   [=](double t) { return aid(inner + t, sigma); }, spec)
        .value;
}

complex kernel_ai_b2(complex Z1, complex Z2, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    double Y1 = Z1.imag(), Y2 = Z2.imag();
    double pref = std::exp(-(Y1 * Y1 + Y2 * Y2) / (2.0 * sigma * sigma)) /
                  (sigma * std::sqrt(M_PI));
    return pref * aid_product_integral(Z1, Z2, sigma, spec);
}

double density_ai_b2(complex Z, double sigma, qd::QuadratureSpec spec) {
    return kernel_ai_b2(Z, std::conj(Z), sigma, spec).real();
}

complex kernel_ai_b4(complex Z1, complex Z2, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    double Y1 = Z1.imag(), Y2 = Z2.imag();
    double s3 = sigma * sigma * sigma;
    complex pref = complex{0.0, -1.0} * std::sqrt(std::abs(Y1 * Y2)) /
                   (4.0 * std::sqrt(M_PI) * s3) *
                   std::exp(-(Y1 * Y1 + Y2 * Y2) / (2.0 * sigma * sigma));
    complex nested = aid_nested_integral(Z2, Z1, sigma, spec) -
                     aid_nested_integral(Z1, Z2, sigma, spec);
    return pref * nested;
}

double density_ai_b4(complex Z, double sigma, qd::QuadratureSpec spec) {
    return kernel_ai_b4(Z, std::conj(Z), sigma, spec).real();
}

double density_ai_b4_im_form(complex Z, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    double Y = Z.imag();
    double s3 = sigma * sigma * sigma;
    double pref = Y / (2.0 * std::sqrt(M_PI) * s3) *
                  std::exp(-Y * Y / (sigma * sigma));
    return pref * aid_nested_integral(std::conj(Z), Z, sigma, spec).imag();
}

complex prekernel_ai_b1(complex Z1, complex Z2, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    double Y1 = Z1.imag(), Y2 = Z2.imag();
    double le = 0.5 * (sf::log_erfc_real(std::abs(Y1) / sigma) +
                       sf::log_erfc_real(std::abs(Y2) / sigma));
    if (le < -700.0) return {0.0, 0.0};
    complex diff = aid_product_integral(Z1, Z2, sigma, spec) -
                   aid_product_integral_rate0(Z1, Z2, sigma, spec);
    return (Z1 - Z2) / (4.0 * sigma * sigma) * std::exp(le) * diff;
}

double density_ai_complex_b1(complex Z, double sigma, qd::QuadratureSpec spec) {
    double s = sgn(Z.imag());
    if (s == 0.0) return 0.0;
    complex v = complex{0.0, -2.0} * s * prekernel_ai_b1(Z, std::conj(Z), sigma, spec);
    return v.real();
}

complex g_ai_real_b1(complex Z1, double X2, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    double le = 0.5 * sf::log_erfc_real(std::abs(Z1.imag()) / sigma);
    if (le < -700.0) return {0.0, 0.0};
    complex u1 = aid_product_integral(Z1, {X2, 0.0}, sigma, spec);
    complex u23 = 0.5 * aid(Z1, sigma) *
                  (1.0 - aid_single_integral({X2, 0.0}, sigma, spec));
    return -std::exp(le) * (u1 + u23);
}

double density_ai_real_b1(double X, double sigma, qd::QuadratureSpec spec) {
    return -g_ai_real_b1({X, 0.0}, X, sigma, spec).real();
}

double w_ai_rr_b1(double X1, double X2, double sigma, qd::QuadratureSpec spec) {
    check_sigma(sigma);
    complex a21 = aid_nested_integral({X2, 0.0}, {X1, 0.0}, sigma, spec);
    complex a12 = aid_nested_integral({X1, 0.0}, {X2, 0.0}, sigma, spec);
    complex b2 = aid_single_integral({X2, 0.0}, sigma, spec);
    complex b1 = aid_single_integral({X1, 0.0}, sigma, spec);
    return -(a21 - a12 + b2 - b1).real();
}

complex g_ai_complex_b1(complex Z1, complex Z2, double sigma, qd::QuadratureSpec spec) {
    double s = sgn(Z2.imag());
    if (s == 0.0) return {0.0, 0.0};
    return complex{0.0, 2.0} * s * prekernel_ai_b1(Z1, std::conj(Z2), sigma, spec);
}

// ---- Hermitian limits ------------------------------------------------------

double hermitian_airy_kernel(double X1, double X2) {
    double a1 = sf::airy_ai({X1, 0}).real(), a2 = sf::airy_ai({X2, 0}).real();
    double p1 = sf::airy_ai_prime({X1, 0}).real(), p2 = sf::airy_ai_prime({X2, 0}).real();
    if (std::abs(X1 - X2) < 1e-6) {
        // confluent diagonal form, continued linearly off the diagonal
        double xm = 0.5 * (X1 + X2);
        double am = sf::airy_ai({xm, 0}).real(), pm = sf::airy_ai_prime({xm, 0}).real();
        return pm * pm - xm * am * am;
    }
    return (a1 * p2 - p1 * a2) / (X1 - X2);
}

double hermitian_airy_kernel_integral(double X1, double X2, qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point =
            qd::airy_product_truncation({X1, 0}, {X2, 0}, 0.0, 0.0, 0.0, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double t) {
                   return sf::airy_ai({X1 + t, 0}) * sf::airy_ai({X2 + t, 0});
               },
               spec)
        .value.real();
}

namespace {

// integral_X^inf Ai = integral_0^inf Ai(X + t) dt
double airy_tail_integral(double X, qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point =
            qd::airy_single_truncation({X, 0}, 0.0, 0.0, 0.0, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double t) { return sf::airy_ai({X + t, 0}); }, spec)
        .value.real();
}

// integral_0^inf Ai(X1 + s) Ai'(X2 + s) ds
double airy_aiprime_integral(double X1, double X2, qd::QuadratureSpec spec) {
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point =
            qd::airy_product_truncation({X1, 0}, {X2, 0}, 0.0, 0.0, 2.0, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double s) {
                   return sf::airy_ai({X1 + s, 0}) * sf::airy_ai_prime({X2 + s, 0});
               },
               spec)
        .value.real();
}

} // namespace

HermitianElementsB4 hermitian_elements_b4(double X1, double X2, qd::QuadratureSpec spec) {
    double ai1 = sf::airy_ai({X1, 0}).real(), ai2 = sf::airy_ai({X2, 0}).real();
    double tail1 = airy_tail_integral(X1, spec), tail2 = airy_tail_integral(X2, spec);

    HermitianElementsB4 out;
    out.t2 = 2.0 * hermitian_airy_kernel(X1, X2) - ai1 * tail2;
    out.t3 = 2.0 * hermitian_airy_kernel(X2, X1) - ai2 * tail1;
    out.t4 = 2.0 * airy_aiprime_integral(X1, X2, spec) + ai1 * ai2;
    // T1 = 2 int_{X2}^{X1} K(t, X2) dt - (int_{X2}^{X1} Ai)(int_{X2}^inf Ai)
    complex kint = qd::integrate(
                       [&](double t) {
                           return complex{hermitian_airy_kernel(t, X2), 0.0};
                       },
                       X2, X1, spec)
                       .value;
    complex aint = qd::integrate(
                       [&](double t) { return sf::airy_ai({t, 0}); }, X2, X1, spec)
                       .value;
    out.t1 = 2.0 * kint.real() - aint.real() * tail2;
    return out;
}

HermitianElementsB1 hermitian_elements_b1(double X1, double X2, qd::QuadratureSpec spec) {
    double ai1 = sf::airy_ai({X1, 0}).real(), ai2 = sf::airy_ai({X2, 0}).real();
    double tail2 = airy_tail_integral(X2, spec);

    HermitianElementsB1 out;
    out.khat0 = 0.5 * (airy_aiprime_integral(X1, X2, spec) + 0.5 * ai1 * ai2);
    out.g0 = hermitian_airy_kernel(X1, X2) + 0.5 * ai1 * (1.0 - tail2);
    complex kint = qd::integrate(
                       [&](double t) {
                           return complex{hermitian_airy_kernel(t, X2), 0.0};
                       },
                       X2, X1, spec)
                       .value;
    complex aint = qd::integrate(
                       [&](double t) { return sf::airy_ai({t, 0}); }, X2, X1, spec)
                       .value;
    out.wrr0 = 2.0 * (kint.real() + 0.5 * aint.real() * (1.0 - tail2));
    return out;
}

double hermitian_density_b2(double X) { return hermitian_airy_kernel(X, X); }

double hermitian_density_b4(double X, qd::QuadratureSpec spec) {
    return 0.5 * hermitian_airy_kernel(X, X) -
           0.25 * sf::airy_ai({X, 0}).real() * airy_tail_integral(X, spec);
}

double hermitian_density_real_b1(double X, qd::QuadratureSpec spec) {
    return hermitian_airy_kernel(X, X) +
           0.5 * sf::airy_ai({X, 0}).real() * (1.0 - airy_tail_integral(X, spec));
}

// ---- strong (sigma -> inf) edge limits -------------------------------------

complex strong_edge_kernel_b2(complex Z1, complex Z2) {
    double Y1 = Z1.imag(), Y2 = Z2.imag();
    complex d = Z1 - Z2;
    return std::exp(complex(-(Y1 * Y1 + Y2 * Y2) / 2.0, 0.0) - d * d / 4.0) *
           sf::erfc(0.5 * (Z1 + Z2)) / (2.0 * M_PI);
}

double strong_edge_density_b2(complex Z) {
    return std::erfc(Z.real()) / (2.0 * M_PI);
}

namespace {

double gaussian_erfc_T(complex Z1, complex Z2, double abs_tol) {
    double y = std::max(std::abs(Z1.imag()), std::abs(Z2.imag()));
    double x = std::min(Z1.real(), Z2.real());
    return std::max(1.0, -x + std::sqrt(y * y + 2.0 * std::log(10.0 / abs_tol)) + 2.0);
}

complex strong_b4_half(complex Za, complex Zb, qd::QuadratureSpec spec) {
    // integral_0^inf du exp[-(u+Za)^2/2] erfc((u+Zb)/sqrt 2)
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point = gaussian_erfc_T(Za, Zb, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double u) {
                   complex g = u + Za;
                   return std::exp(-g * g / 2.0) * sf::erfc((u + Zb) / std::sqrt(2.0));
               },
               spec)
        .value;
}

} // namespace

complex strong_edge_kernel_b4(complex Z1, complex Z2, qd::QuadratureSpec spec) {
    double Y1 = Z1.imag(), Y2 = Z2.imag();
    complex pref = complex{0.0, -1.0} * std::sqrt(std::abs(Y1 * Y2)) /
                   (4.0 * std::sqrt(2.0) * M_PI) *
                   std::exp(-(Y1 * Y1 + Y2 * Y2) / 2.0);
    return pref * (strong_b4_half(Z1, Z2, spec) - strong_b4_half(Z2, Z1, spec));
}

double strong_edge_density_b4(complex Z, qd::QuadratureSpec spec) {
    double Y = Z.imag();
    double pref = Y / (2.0 * std::sqrt(2.0) * M_PI) * std::exp(-Y * Y);
    return pref * strong_b4_half(Z, std::conj(Z), spec).imag();
}

namespace {

complex khat_edge_b1(complex Z1, complex Z2) {
    double le = 0.5 * (sf::log_erfc_real(std::abs(Z1.imag())) +
                       sf::log_erfc_real(std::abs(Z2.imag())));
    complex d = Z1 - Z2;
    return d / (8.0 * std::sqrt(M_PI)) * std::exp(complex(le, 0.0) - d * d / 4.0) *
           sf::erfc(0.5 * (Z1 + Z2));
}

complex g_real_edge_b1(complex Z1, double X2) {
    double le = 0.5 * sf::log_erfc_real(std::abs(Z1.imag()));
    complex d = Z1 - X2;
    complex t1 = std::exp(complex(le, 0.0) - d * d / 4.0) *
                 sf::erfc(0.5 * (Z1 + X2)) / (2.0 * std::sqrt(M_PI));
    complex t2 = std::exp(complex(le, 0.0) - Z1 * Z1 / 2.0) / std::sqrt(2.0 * M_PI) *
                 (1.0 - 0.5 * sf::erfc(X2 / std::sqrt(2.0)).real());
    return -(t1 + t2);
}

double p_edge_b1(double X1, double X2, qd::QuadratureSpec spec) {
    // P(X1, X2) = (1/sqrt(2 pi)) int_0^inf ds exp[-(X2+s)^2/2] erf((X1+s)/sqrt 2)
    if (!(spec.truncation_point > 0.0))
        spec.truncation_point = gaussian_erfc_T({X2, 0}, {X2, 0}, spec.abs_tol);
    return qd::semiinfinite_integral(
               [=](double s) {
                   double g = X2 + s;
                   return complex{std::exp(-g * g / 2.0) * std::erf((X1 + s) / std::sqrt(2.0)),
                                  0.0};
               },
               spec)
               .value.real() /
           std::sqrt(2.0 * M_PI);
}

} // namespace

StrongEdgeB1 strong_edge_elements_b1(complex Z1, complex Z2, qd::QuadratureSpec spec) {
    StrongEdgeB1 out;
    out.khat = khat_edge_b1(Z1, Z2);
    out.g_real = g_real_edge_b1(Z1, Z2.real());
    out.g_complex = complex{0.0, 2.0} * sgn(Z2.imag()) * khat_edge_b1(Z1, std::conj(Z2));
    double q1 = 0.5 * std::erfc(Z1.real() / std::sqrt(2.0));
    double q2 = 0.5 * std::erfc(Z2.real() / std::sqrt(2.0));
    out.w_rr = -(p_edge_b1(Z1.real(), Z2.real(), spec) - p_edge_b1(Z2.real(), Z1.real(), spec) +
                 q2 - q1);
    out.w_rc = complex{0.0, -2.0} * sgn(Z2.imag()) * g_real_edge_b1(std::conj(Z2), Z1.real());
    out.w_cc = 4.0 * sgn(Z1.imag()) * sgn(Z2.imag()) *
               khat_edge_b1(std::conj(Z1), std::conj(Z2));
    return out;
}

double strong_edge_density_complex_b1(complex Z) {
    double Y = std::abs(Z.imag());
    if (Y == 0.0) return 0.0;
    double lg = Y * Y + sf::log_erfc_real(Y);
    return Y / (2.0 * std::sqrt(M_PI)) * std::exp(lg) * std::erfc(Z.real());
}

double strong_edge_density_real_b1(double X) {
    return (std::erfc(X) +
            std::exp(-X * X / 2.0) * std::erfc(-X / std::sqrt(2.0)) / std::sqrt(2.0)) /
           (2.0 * std::sqrt(M_PI));
}

// ---- Poisson kernel ---------------------------------------------------------

complex poisson_kernel(int beta, complex z1, complex z2) {
    if (beta != 1 && beta != 2 && beta != 4)
        throw std::domain_error("poisson_kernel: beta must be 1, 2 or 4");
    if (z1.imag() != -z2.imag()) return {0.0, 0.0};
    double x1 = z1.real(), x2 = z2.real(), y1 = z1.imag(), y2 = z2.imag();
    double m2 = std::exp(-(x1 + x2 + y1 * y1 + y2 * y2) / 2.0) / std::sqrt(M_PI);
    if (beta == 2) return {m2, 0.0};
    if (beta == 4) return {0.5 * m2, 0.0};
    return complex{0.0, 0.5} * sgn(y1) * m2;
}

// ---- bulk -------------------------------------------------------------------

complex bulk_sine_kernel(complex z1, complex z2, double sigma, qd::QuadratureSpec spec) {
    if (!(sigma > 0.0)) throw std::domain_error("bulk_sine_kernel: sigma must be positive");
    double y1 = z1.imag(), y2 = z2.imag();
    double s2 = sigma * sigma;
    complex d = z1 - z2;
    // s = u^2 removes the 1/sqrt(s) endpoint
    complex integral = qd::integrate(
                           [=](double u) {
                               return 2.0 * std::exp(-u * u * s2) * std::cos(u * d);
                           },
                           0.0, 1.0, spec)
                           .value;
    double pref = std::exp(-(y1 * y1 + y2 * y2) / (2.0 * s2)) /
                  (2.0 * sigma * std::pow(M_PI, 1.5));
    return pref * integral;
}

} // namespace gek::limits
