#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gek/errors.hpp"
#include "gek/quad.hpp"
#include "gek/specfun.hpp"

using gek::complex;
using namespace gek::quad;

namespace {

QuadratureSpec spec_with_T(double T) {
    QuadratureSpec s = default_spec();
    s.truncation_point = T;
    return s;
}

} // namespace

TEST_CASE("semiinfinite on elementary integrands") {
    // exp(-t) -> 1
    Integral a = semiinfinite_integral([](double t) { return complex{std::exp(-t), 0}; },
                                       spec_with_T(40.0));
    CHECK(std::abs(a.value.real() - 1.0) < 1e-12);
    CHECK(std::abs(a.value.imag()) < 1e-15);

    // t exp(-t^2) -> 1/2
    Integral b = semiinfinite_integral(
        [](double t) { return complex{t * std::exp(-t * t), 0}; }, spec_with_T(15.0));
    CHECK(std::abs(b.value.real() - 0.5) < 1e-12);

    // Ai(t) -> 1/3
    QuadratureSpec s = default_spec();
    s.truncation_point = airy_single_truncation({0, 0}, 0.0, 0.0, 0.0, s.abs_tol);
    Integral c = semiinfinite_integral(
        [](double t) { return gek::specfun::airy_ai({t, 0}); }, s);
    CHECK(std::abs(c.value.real() - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("finite-interval integrate handles orientation and closed forms") {
    QuadratureSpec s = default_spec();
    Integral f = integrate([](double t) { return complex{std::cos(t), 0}; }, 0.0, M_PI / 2, s);
    CHECK(std::abs(f.value.real() - 1.0) < 1e-12);
    Integral g = integrate([](double t) { return complex{std::cos(t), 0}; }, M_PI / 2, 0.0, s);
    CHECK(std::abs(g.value.real() + 1.0) < 1e-12);
}

TEST_CASE("linearity") {
    QuadratureSpec s = spec_with_T(40.0);
    auto f = [](double t) { return complex{std::exp(-t), 0.0}; };
    auto g = [](double t) { return complex{t * std::exp(-t * t), 0.0}; };
    complex a{2.5, -1.0}, b{0.75, 3.0};
    auto combo = [&](double t) { return a * f(t) + b * g(t); };
    complex lhs = semiinfinite_integral(combo, s).value;
    complex rhs = a * semiinfinite_integral(f, s).value + b * semiinfinite_integral(g, s).value;
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("refinement monotonicity on a random damped-oscillation suite") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> amp(0.5, 2.0), freq(0.3, 6.0), decay(0.4, 2.0);
    for (int i = 0; i < 50; ++i) {
        double A = amp(rng), w = freq(rng), d = decay(rng);
        auto f = [=](double t) {
            return complex{A * std::exp(-d * t) * std::cos(w * t),
                           0.5 * A * std::exp(-d * t) * std::sin(0.7 * w * t)};
        };
        QuadratureSpec coarse = spec_with_T(60.0);
        coarse.rel_tol = 1e-7;
        coarse.abs_tol = 1e-9;
        Integral got = semiinfinite_integral(f, coarse);

        QuadratureSpec fine = coarse;
        fine.rel_tol = 1e-12;
        fine.abs_tol = 1e-14;
        Integral ref = semiinfinite_integral(f, fine);

        CAPTURE(A);
        CAPTURE(w);
        CAPTURE(d);
        CHECK(std::abs(got.value - ref.value) <= got.error + 1e-14);
    }
}

TEST_CASE("exp-airy product integral") {
    QuadratureSpec s = default_spec();

    SUBCASE("diagonal real arguments reproduce the Airy-kernel closed form") {
        for (double X : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            complex got = exp_airy_product_integral({X, 0}, {X, 0}, 0.0, 0.0, s);
            complex ai = gek::specfun::airy_ai({X, 0});
            complex aip = gek::specfun::airy_ai_prime({X, 0});
            complex want = aip * aip - X * ai * ai;
            CAPTURE(X);
            CHECK(std::abs(got - want) < 1e-10);
        }
    }

    SUBCASE("value at the origin") {
        complex got = exp_airy_product_integral({0, 0}, {0, 0}, 0.0, 0.0, s);
        // Ai'(0)^2 = 3^{-2/3} / Gamma(1/3)^2
        double want = 0.066987483779663974144;
        CHECK(std::abs(got.real() - want) < 1e-11);
    }

    SUBCASE("argument-swap symmetry") {
        complex z1{-0.7, 0.9}, z2{1.3, -0.4};
        complex a = exp_airy_product_integral(z1, z2, 0.25, 1.0, s);
        complex b = exp_airy_product_integral(z2, z1, 0.25, 1.0, s);
        CHECK(std::abs(a - b) < 1e-13 * std::max(1.0, std::abs(a)));
    }

    SUBCASE("tail-bound validity: doubling T moves the result below abs_tol") {
        complex z1{-1.0, 0.5}, z2{0.3, -0.2};
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-2.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            complex w1{u(rng), u(rng)}, w2{u(rng), u(rng)};
            double rate = 0.5 * (u(rng) + 2.0);
            double T = airy_product_truncation(w1, w2, 0.0, rate, 0.0, s.abs_tol);
            QuadratureSpec s1 = s;
            s1.truncation_point = T;
            QuadratureSpec s2 = s;
            s2.truncation_point = 2.0 * T;
            complex v1 = exp_airy_product_integral(w1, w2, 0.0, rate, s1);
            complex v2 = exp_airy_product_integral(w1, w2, 0.0, rate, s2);
            CHECK(std::abs(v1 - v2) <= s.abs_tol);
        }
    }
}

TEST_CASE("nested exp-airy integral") {
    QuadratureSpec s = default_spec();

    SUBCASE("antisymmetrised combination vanishes at equal arguments") {
        complex z{0.4, 0.6};
        complex v = nested_exp_airy_integral(z, z, 0.1, 0.8, s);
        complex w = nested_exp_airy_integral(z, z, 0.1, 0.8, s);
        CHECK(std::abs(v - w) < 1e-14);
    }

    SUBCASE("matches 2-D composite-Simpson tensor oracle at rate 0") {
        complex z1{0, 0}, z2{1, 0};
        complex got = nested_exp_airy_integral(z1, z2, 0.0, 0.0, s);

        // brute-force oracle: Simpson in s over [0,L], Simpson in t over [0,s]
        auto ai = [](double x) { return gek::specfun::airy_ai({x, 0}).real(); };
        const double L = 14.0;
        const int n = 700; // even
        auto inner = [&](double sv) {
            if (sv == 0.0) return 0.0;
            int m = 256;
            double h = sv / m, acc = ai(0.0) + ai(sv);
            for (int k = 1; k < m; ++k) acc += (k % 2 ? 4.0 : 2.0) * ai(k * h);
            return acc * h / 3.0;
        };
        double h = L / n;
        double acc = ai(1.0) * inner(0.0) + ai(1.0 + L) * inner(L);
        for (int k = 1; k < n; ++k) {
            double sv = k * h;
            acc += (k % 2 ? 4.0 : 2.0) * ai(1.0 + sv) * inner(sv);
        }
        double want = acc * h / 3.0;
        CHECK(std::abs(got.real() - want) < 1e-8);
        CHECK(std::abs(got.imag()) < 1e-12);
    }

    SUBCASE("inner cumulative differentiates back to the inner integrand") {
        // d/ds of the inner integral equals the inner integrand (FTC); checked
        // through the full nested routine by differencing the outer integrand.
        complex z1{-0.5, 0.2};
        double rate = 0.6, shift = 0.3;
        QuadratureSpec sp = s;
        sp.truncation_point = 30.0;
        auto inner_int = [&](double sv) {
            return integrate(
                       [&](double t) {
                           return std::exp(rate * t) *
                                  gek::specfun::airy_ai(z1 + shift + t);
                       },
                       0.0, sv, sp)
                .value;
        };
        double h = 1e-4, sv = 1.7;
        complex d = (inner_int(sv + h) - inner_int(sv - h)) / (2 * h);
        complex want = std::exp(rate * sv) * gek::specfun::airy_ai(z1 + shift + sv);
        CHECK(std::abs(d - want) < 1e-6);
    }
}

TEST_CASE("spec validation and convergence errors") {
    QuadratureSpec bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);

    QuadratureSpec tiny = default_spec();
    tiny.max_panels = 4;
    tiny.rel_tol = 1e-14;
    tiny.abs_tol = 1e-16;
    tiny.truncation_point = 60.0;
    auto nasty = [](double t) { return complex{std::cos(40.0 * t) / (1.0 + t * t), 0}; };
    CHECK_THROWS_AS(semiinfinite_integral(nasty, tiny), gek::convergence_error);
}
