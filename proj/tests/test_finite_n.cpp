#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gek/errors.hpp"
#include "gek/finite_n.hpp"
#include "gek/quad.hpp"
#include "gek/specfun.hpp"

using gek::complex;
using namespace gek::finite_n;
namespace sf = gek::specfun;

namespace {

double rel_err(complex got, complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

EnsembleSpec make(int beta, int n, double tau) {
    EnsembleSpec s;
    s.beta = beta;
    s.n = n;
    s.tau = tau;
    return s;
}

} // namespace

TEST_CASE("weight examples") {
    CHECK(weight(2, {0, 0}, 0.37) == doctest::Approx(1.0));
    // beta=1 on the real axis: w1(x) = exp(-x^2/(2(1+tau))) = sqrt(w2(x))
    for (double x : {-1.3, 0.2, 2.8}) {
        double tau = 0.45;
        double w1 = weight(1, {x, 0}, tau);
        CHECK(w1 == doctest::Approx(std::exp(-x * x / (2 * (1 + tau)))).epsilon(1e-13));
        CHECK(w1 == doctest::Approx(std::sqrt(weight(2, {x, 0}, tau))).epsilon(1e-13));
    }
    CHECK(weight(2, {1, 1}, 0.5) == doctest::Approx(std::exp(-8.0 / 3.0)).epsilon(1e-13));
    CHECK(weight(4, {1, 1}, 0.5) == doctest::Approx(weight(2, {1, 1}, 0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(weight(2, {0, 0}, 1.0), std::domain_error);
    // strictly positive even far out on the imaginary direction
    CHECK(weight(1, {0.0, 6.0}, 0.9) > 0.0);
}

TEST_CASE("kernel_b2 basics") {
    SUBCASE("N = 1 closed form") {
        double tau = 0.35;
        EnsembleSpec s = make(2, 1, tau);
        complex z1{0.3, -0.2}, z2{-1.1, 0.6};
        complex got = kernel_b2(z1, z2, s);
        double lw = 0.5 * (log_weight(2, z1, tau) + log_weight(2, z2, tau));
        complex want = std::exp(lw) / (M_PI * std::sqrt(1 - tau * tau));
        CHECK(rel_err(got, want) < 1e-13);
    }
    SUBCASE("argument parity") {
        EnsembleSpec s = make(2, 6, 0.55);
        complex z1{1.2, 0.4}, z2{-0.3, -0.9};
        CHECK(rel_err(kernel_b2(-z1, -z2, s), kernel_b2(z1, z2, s)) < 1e-12);
    }
    SUBCASE("density integrates to N") {
        // 2-D tensor Gauss-Legendre oracle over a box that captures the tails
        EnsembleSpec s = make(2, 3, 0.5);
        gek::quad::QuadratureSpec qs = gek::quad::default_spec();
        qs.rel_tol = 1e-9;
        qs.abs_tol = 1e-11;
        auto row = [&](double y) {
            return gek::quad::integrate(
                       [&](double x) { return kernel_b2({x, y}, {x, -y}, s); }, -8.0, 8.0, qs)
                .value;
        };
        complex total =
            gek::quad::integrate([&](double y) { return row(y); }, -4.0, 4.0, qs).value;
        CHECK(std::abs(total.real() - 3.0) < 1e-6);
        CHECK(std::abs(total.imag()) < 1e-9);
    }
}

TEST_CASE("prekernel_b4") {
    EnsembleSpec s = make(4, 2, 0.4);
    SUBCASE("antisymmetry and N = 2 closed form") {
        complex z{0.7, 0.3};
        CHECK(std::abs(prekernel_b4(z, z, s)) < 1e-15);
        complex z1{0.5, 1.1}, z2{-0.2, 0.6};
        double r0 = 2 * M_PI * std::pow(1 - s.tau, 1.5) * std::sqrt(1 + s.tau);
        CHECK(rel_err(prekernel_b4(z1, z2, s), (z1 - z2) / r0) < 1e-13);
    }
    SUBCASE("sign flip under global negation") {
        EnsembleSpec s8 = make(4, 8, 0.3);
        complex z1{1.4, 0.2}, z2{0.3, 0.8};
        CHECK(rel_err(prekernel_b4(-z1, -z2, s8), -prekernel_b4(z1, z2, s8)) < 1e-12);
    }
}

TEST_CASE("kernel_b4") {
    SUBCASE("vanishes on the real axis") {
        EnsembleSpec s = make(4, 6, 0.2);
        CHECK(std::abs(kernel_b4({0.8, 0.0}, {0.8, 0.0}, s)) == 0.0);
    }
    SUBCASE("density real and nonnegative") {
        // upper-half-plane representatives (the symmetric matrix-kernel
        // convention); the lower half follows by conjugation symmetry
        EnsembleSpec s = make(4, 8, 0.45);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-2.5, 2.5), uy(0.0, 2.5);
        for (int i = 0; i < 50; ++i) {
            complex z{ux(rng), uy(rng)};
            complex d = kernel_b4(z, std::conj(z), s);
            CHECK(std::abs(d.imag()) < 1e-12 * std::max(1.0, std::abs(d.real())));
            CHECK(d.real() > -1e-14);
        }
    }
    SUBCASE("N = 2 symbolic oracle at z = i") {
        double tau = 0.3;
        EnsembleSpec s = make(4, 2, tau);
        double r0 = 2 * M_PI * std::pow(1 - tau, 1.5) * std::sqrt(1 + tau);
        // Khat2(i, -i) = 2i/r0; kernel = (-2i) sqrt|y1 y2| w4(i) Khat = 4 w/r0
        double want = 4.0 * weight(4, {0, 1}, tau) / r0;
        complex got = kernel_b4({0, 1}, {0, -1}, s);
        CHECK(rel_err(got, {want, 0}) < 1e-12);
    }
}

TEST_CASE("prekernel_b1") {
    SUBCASE("antisymmetry and N = 2 closed form") {
        EnsembleSpec s = make(1, 2, 0.6);
        complex z{0.1, -0.7};
        CHECK(std::abs(prekernel_b1(z, z, s)) < 1e-15);
        complex z1{0.9, 0.2}, z2{-0.4, 1.0};
        complex want = (z1 - z2) / (2 * std::sqrt(2 * M_PI) * (1 + s.tau));
        CHECK(rel_err(prekernel_b1(z1, z2, s), want) < 1e-13);
    }
    SUBCASE("finite-N identity linking beta = 1 and beta = 2 pre-kernels") {
        // 2 sqrt(2 pi)(1-tau^2) Khat_N^(1) = pi sqrt(1-tau^2)(z1-z2) Khat_{N-1}^(2)
        //   - tau/(N-2)! * {p_{N-1}(z1) p_{N-2}(z2) - (z1 <-> z2)}
        int n = 6;
        double tau = 0.4;
        EnsembleSpec s = make(1, n, tau);
        std::mt19937_64 rng(2718);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 25; ++trial) {
            complex z1{u(rng), u(rng)}, z2{u(rng), u(rng)};
            complex lhs = 2 * std::sqrt(2 * M_PI) * (1 - tau * tau) * prekernel_b1(z1, z2, s);
            complex t1 = M_PI * std::sqrt(1 - tau * tau) * (z1 - z2) *
                         prekernel_b2(z1, z2, n - 1, tau);
            complex pa = sf::scaled_hermite_p(n - 1, z1, tau).value() *
                         sf::scaled_hermite_p(n - 2, z2, tau).value();
            complex pb = sf::scaled_hermite_p(n - 1, z2, tau).value() *
                         sf::scaled_hermite_p(n - 2, z1, tau).value();
            complex rhs = t1 - tau / std::tgamma(n - 1.0) * (pa - pb);
            CAPTURE(z1);
            CAPTURE(z2);
            CHECK(rel_err(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("I_j family") {
    double tau = 0.4;
    SUBCASE("I_0 reproduces its error-function closed form") {
        for (double x : {-1.5, 0.0, 0.7, 3.0}) {
            double want = std::sqrt(2 * M_PI * (1 + tau)) * std::erf(x / std::sqrt(2 * (1 + tau)));
            CHECK(std::abs(i_j(x, tau, 0) - want) < 1e-13);
        }
    }
    SUBCASE("I_1 closed form") {
        for (double x : {-0.8, 0.4, 1.9}) {
            double w1 = std::exp(-x * x / (2 * (1 + tau)));
            double want = -2 * std::sqrt(2.0) * (1 + tau) / std::sqrt(tau) * w1;
            CHECK(std::abs(i_j(x, tau, 1) - want) < 1e-12 * std::abs(want));
        }
    }
    SUBCASE("quadrature oracle for j = 5") {
        double x = 0.7;
        gek::quad::QuadratureSpec qs = gek::quad::default_spec();
        auto h5 = [&](double t) {
            return complex{sf::hermite_h(5, {t / std::sqrt(2 * tau), 0}).value().real() *
                               std::exp(-t * t / (2 * (1 + tau))),
                           0.0};
        };
        double left = gek::quad::integrate(h5, -40.0, x, qs).value.real();
        double right = gek::quad::integrate(h5, x, 40.0, qs).value.real();
        double want = left - right;
        CHECK(std::abs(i_j(x, tau, 5) - want) < 1e-8 * std::max(1.0, std::abs(want)));
    }
    SUBCASE("recurrence from integration by parts") {
        // I_j = sqrt(2 tau)(1+tau)/(j+1) H_{j+1}(x/sqrt(2 tau)) w1(x) + tau/(2(j+1)) I_{j+2}
        double x = 0.8, tq = 0.6;
        for (int j = 0; j <= 30; ++j) {
            double hj = sf::hermite_h(j + 1, {x / std::sqrt(2 * tq), 0}).value().real();
            double w1 = std::exp(-x * x / (2 * (1 + tq)));
            double resid = i_j(x, tq, j) -
                           std::sqrt(2 * tq) * (1 + tq) / (j + 1.0) * hj * w1 -
                           tq / (2 * (j + 1.0)) * i_j(x, tq, j + 2);
            CAPTURE(j);
            CHECK(std::abs(resid) < 1e-10 * std::max(1.0, std::abs(i_j(x, tq, j))));
        }
    }
    SUBCASE("parity") {
        for (int j = 0; j <= 12; ++j) {
            for (double x : {0.3, 1.1, 2.2}) {
                double a = i_j(x, tau, j);
                double b = i_j(-x, tau, j);
                double want = (j % 2 == 0) ? -a : a; // I_j(-x) = (-1)^{j+1} I_j(x)
                CAPTURE(j);
                CHECK(std::abs(b - want) < 1e-10 * std::max(1.0, std::abs(a)));
            }
        }
    }
}

TEST_CASE("g_real_b1") {
    SUBCASE("relation path agrees with the direct skew-orthogonal sum") {
        EnsembleSpec s = make(1, 6, 0.5);
        complex z1{0.3, 0.2};
        double x2 = -0.1;
        complex a = g_real_b1(z1, x2, s);
        complex b = g_real_b1_direct(z1, x2, s);
        CHECK(rel_err(a, b) < 1e-10);
        // and on a small sweep of arguments
        std::mt19937_64 rng(5150);
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        for (int t = 0; t < 10; ++t) {
            complex z{u(rng), u(rng)};
            double x = u(rng);
            CHECK(rel_err(g_real_b1(z, x, s), g_real_b1_direct(z, x, s)) < 1e-10);
        }
    }
    SUBCASE("N = 2 value at the origin") {
        EnsembleSpec s = make(1, 2, 0.37);
        complex got = g_real_b1({0, 0}, 0.0, s);
        CHECK(rel_err(got, {-1.0 / std::sqrt(2 * M_PI), 0}) < 1e-12);
    }
    SUBCASE("real-eigenvalue density is nonnegative") {
        EnsembleSpec s = make(1, 8, 0.5);
        for (double x = -5.0; x <= 5.0; x += 0.5) {
            complex d = -g_real_b1({x, 0.0}, x, s);
            CHECK(d.real() > -1e-12);
            CHECK(std::abs(d.imag()) < 1e-12);
        }
    }
}

TEST_CASE("matrix kernel beta = 1 structure") {
    EnsembleSpec s = make(1, 6, 0.45);
    SUBCASE("W^RR antisymmetry") {
        for (auto [x1, x2] : {std::pair{0.4, -0.9}, {1.7, 0.3}, {-2.0, -0.5}}) {
            double a = w_rr_b1(x1, x2, s);
            double b = w_rr_b1(x2, x1, s);
            CAPTURE(x1);
            CAPTURE(x2);
            CHECK(std::abs(a + b) < 1e-12 * std::max(1.0, std::abs(a)));
        }
        CHECK(std::abs(w_rr_b1(0.7, 0.7, s)) < 1e-13);
    }
    SUBCASE("W^RR against its defining integral at N = 2") {
        EnsembleSpec s2 = make(1, 2, 0.5);
        double x1 = 0.6, x2 = -0.3;
        gek::quad::QuadratureSpec qs = gek::quad::default_spec();
        qs.rel_tol = 1e-11;
        auto f = [&](double t) {
            return weight(1, {t, 0}, s2.tau) * g_real_b1({t, 0.0}, x2, s2);
        };
        complex left = gek::quad::integrate(f, -40.0, x1, qs).value;
        complex right = gek::quad::integrate(f, x1, 40.0, qs).value;
        double want = weight(1, {x1, 0}, s2.tau) * (left - right).real();
        CHECK(std::abs(w_rr_b1(x1, x2, s2) - want) < 1e-9 * std::max(1.0, std::abs(want)));
    }
    SUBCASE("G^C vanishes on the real axis, W^CC vanishes for real argument") {
        CHECK(std::abs(g_complex_b1({0.2, 0.5}, {0.7, 0.0}, s)) == 0.0);
        CHECK(std::abs(w_cc_b1({0.4, 0.0}, {0.4, 0.0}, s)) == 0.0);
    }
    SUBCASE("block assembly") {
        MatrixKernelB1 b = matrix_kernel_b1({0.3, 0.4}, {-0.2, 0.8}, s);
        CHECK(rel_err(b.khat, prekernel_b1({0.3, 0.4}, {-0.2, 0.8}, s)) < 1e-14);
        CHECK(b.contact_terms_excluded);
    }
}

TEST_CASE("matrix kernel beta = 4 structure") {
    EnsembleSpec s = make(4, 6, 0.35);
    complex z1{0.5, 0.7}, z2{-0.3, 1.2};
    MatrixKernelB4 b = matrix_kernel_b4(z1, z2, s);
    SUBCASE("diagonal pre-kernel entries vanish") {
        MatrixKernelB4 d = matrix_kernel_b4(z1, z1, s);
        CHECK(std::abs(d.k11) < 1e-15);
        CHECK(std::abs(d.k22) < 1e-15);
    }
    SUBCASE("k = 1 Pfaffian reproduces the density") {
        MatrixKernelB4 d = matrix_kernel_b4(z1, z1, s);
        // [[0, k12], [-k12, 0]] has Pf = k12 = kernel(z, z*)
        CHECK(rel_err(d.k12, kernel_b4(z1, std::conj(z1), s)) < 1e-13);
    }
    SUBCASE("conjugation identity k22 = -conj(k11)") {
        CHECK(rel_err(b.k22, -std::conj(b.k11)) < 1e-12);
        CHECK(rel_err(b.k21, -std::conj(b.k12)) < 1e-12);
    }
}

TEST_CASE("correlations") {
    SUBCASE("beta = 2: R1 = kernel diagonal, R2 bounded by product, coincident zero") {
        EnsembleSpec s = make(2, 8, 0.4);
        complex z1{0.8, 0.3}, z2{-0.5, -0.6};
        double r1a = correlations(std::vector<complex>{z1}, s);
        double r1b = correlations(std::vector<complex>{z2}, s);
        CHECK(r1a == doctest::Approx(kernel_b2(z1, std::conj(z1), s).real()).epsilon(1e-12));
        CHECK(r1a >= 0.0);
        double r2 = correlations(std::vector<complex>{z1, z2}, s);
        complex k12 = kernel_b2(z1, std::conj(z2), s);
        complex k21 = kernel_b2(z2, std::conj(z1), s);
        CHECK(r2 == doctest::Approx(r1a * r1b - (k12 * k21).real()).epsilon(1e-10));
        CHECK(r2 <= r1a * r1b + 1e-12);
        double r2c = correlations(std::vector<complex>{z1, z1}, s);
        CHECK(std::abs(r2c) < 1e-12 * r1a * r1a);
    }
    SUBCASE("phase extraction leaves R2 invariant") {
        EnsembleSpec s = make(2, 6, 0.3);
        complex z1{0.4, 0.5}, z2{-0.2, 0.1};
        complex k11 = kernel_b2(z1, std::conj(z1), s);
        complex k12 = kernel_b2(z1, std::conj(z2), s);
        complex k21 = kernel_b2(z2, std::conj(z1), s);
        complex k22 = kernel_b2(z2, std::conj(z2), s);
        complex det0 = k11 * k22 - k12 * k21;
        // row/column phases e^{-i phi_i} e^{+i phi_j}
        double p1 = 0.8, p2 = -2.1;
        complex e1 = std::polar(1.0, p1), e2 = std::polar(1.0, p2);
        complex det1 = (k11 * e1 * std::conj(e1)) * (k22 * e2 * std::conj(e2)) -
                       (k12 * e1 * std::conj(e2)) * (k21 * e2 * std::conj(e1));
        CHECK(rel_err(det1, det0) < 1e-12);
    }
    SUBCASE("beta = 4: k = 1 equals the kernel density") {
        EnsembleSpec s = make(4, 6, 0.25);
        complex z{0.4, 0.9};
        double r1 = correlations(std::vector<complex>{z}, s);
        CHECK(r1 == doctest::Approx(kernel_b4(z, std::conj(z), s).real()).epsilon(1e-12));
    }
    SUBCASE("beta = 1: complex and real densities match the G elements") {
        EnsembleSpec s = make(1, 6, 0.5);
        complex z{0.3, 0.8};
        double r1 = correlations(std::vector<complex>{z}, s);
        complex want = -g_complex_b1(z, z, s);
        CHECK(r1 == doctest::Approx(want.real()).epsilon(1e-12));
        double x = 0.4;
        double r1r = correlations(std::vector<complex>{{x, 0.0}}, s);
        CHECK(r1r == doctest::Approx(-g_real_b1({x, 0}, x, s).real()).epsilon(1e-12));
    }
    SUBCASE("k limit enforced") {
        EnsembleSpec s = make(2, 4, 0.2);
        std::vector<complex> five(5, complex{0, 0});
        CHECK_THROWS_AS(correlations(five, s), std::domain_error);
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(make(3, 4, 0.2).validate(), std::domain_error);
    CHECK_THROWS_AS(make(1, 5, 0.2).validate(), std::domain_error);
    CHECK_THROWS_AS(make(1, 4, 1.0).validate(), std::domain_error);
    CHECK_NOTHROW(make(2, 3, 0.0).validate()); // odd n is fine for beta = 2
}
