#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "gek/errors.hpp"
#include "gek/sampler.hpp"

using gek::complex;
using namespace gek::sampler;

namespace {

EnsembleSpec make(int beta, int n, double tau) {
    EnsembleSpec s;
    s.beta = beta;
    s.n = n;
    s.tau = tau;
    return s;
}

} // namespace

TEST_CASE("trial rng streams are deterministic and decorrelated") {
    TrialRng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
    }
    int agree = 0;
    TrialRng a2(42, 7);
    for (int i = 0; i < 64; ++i) agree += (a2.next_u64() == c.next_u64());
    CHECK(agree <= 1);
}

TEST_CASE("entry moments match the ensemble covariance") {
    SUBCASE("beta = 2 at tau = 0.5") {
        const double tau = 0.5;
        EnsembleSpec s = make(2, 8, tau);
        double sum_sq = 0.0;
        complex sum_cross = 0.0;
        long count = 0;
        for (int t = 0; t < 3000; ++t) {
            Eigen::MatrixXcd j = sample_matrix(s, 99, t);
            for (int a = 0; a < s.n; ++a)
                for (int b = a + 1; b < s.n; ++b) {
                    sum_sq += std::norm(j(a, b));
                    sum_cross += j(a, b) * j(b, a);
                    ++count;
                }
        }
        double se = 1.5 / std::sqrt(static_cast<double>(count));
        CHECK(std::abs(sum_sq / count - 1.0) < 3 * se);
        CHECK(std::abs(sum_cross.real() / count - tau) < 3 * se);
        CHECK(std::abs(sum_cross.imag() / count) < 3 * se);
    }
    SUBCASE("beta = 2 at tau = 0: transposed entries decouple") {
        EnsembleSpec s = make(2, 8, 0.0);
        complex sum_cross = 0.0;
        long count = 0;
        for (int t = 0; t < 3000; ++t) {
            Eigen::MatrixXcd j = sample_matrix(s, 7, t);
            for (int a = 0; a < s.n; ++a)
                for (int b = a + 1; b < s.n; ++b) {
                    sum_cross += j(a, b) * j(b, a);
                    ++count;
                }
        }
        double se = 1.5 / std::sqrt(static_cast<double>(count));
        CHECK(std::abs(sum_cross.real() / count) < 3 * se);
    }
    SUBCASE("beta = 1 real entries") {
        const double tau = 0.4;
        EnsembleSpec s = make(1, 8, tau);
        double sum_sq = 0.0, sum_cross = 0.0;
        long count = 0;
        for (int t = 0; t < 3000; ++t) {
            Eigen::MatrixXcd j = sample_matrix(s, 13, t);
            CHECK(j.imag().cwiseAbs().maxCoeff() == 0.0);
            for (int a = 0; a < s.n; ++a)
                for (int b = a + 1; b < s.n; ++b) {
                    sum_sq += std::norm(j(a, b));
                    sum_cross += (j(a, b) * j(b, a)).real();
                    ++count;
                }
        }
        double se = 1.5 / std::sqrt(static_cast<double>(count));
        CHECK(std::abs(sum_sq / count - 1.0) < 3 * se);
        CHECK(std::abs(sum_cross / count - tau) < 3 * se);
    }
    SUBCASE("beta = 4 quaternion block structure is exact") {
        EnsembleSpec s = make(4, 16, 0.3);
        Eigen::MatrixXcd j = sample_matrix(s, 5, 0);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                CHECK(j(2 * a, 2 * b) == std::conj(j(2 * a + 1, 2 * b + 1)));
                CHECK(j(2 * a, 2 * b + 1) == -std::conj(j(2 * a + 1, 2 * b)));
            }
    }
}

TEST_CASE("spectrum") {
    SUBCASE("diagonal matrix") {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
        m(0, 0) = complex{1, 2};
        m(1, 1) = complex{-0.5, 0};
        m(2, 2) = complex{3, -1};
        auto eigs = spectrum(m);
        std::sort(eigs.begin(), eigs.end(),
                  [](complex a, complex b) { return a.real() < b.real(); });
        CHECK(std::abs(eigs[0] - complex{-0.5, 0}) < 1e-12);
        CHECK(std::abs(eigs[1] - complex{1, 2}) < 1e-12);
        CHECK(std::abs(eigs[2] - complex{3, -1}) < 1e-12);
    }
    SUBCASE("companion matrix of z^2 - 1") {
        Eigen::MatrixXcd m(2, 2);
        m << 0, 1, 1, 0;
        auto eigs = spectrum(m);
        std::sort(eigs.begin(), eigs.end(),
                  [](complex a, complex b) { return a.real() < b.real(); });
        CHECK(std::abs(eigs[0] + 1.0) < 1e-12);
        CHECK(std::abs(eigs[1] - 1.0) < 1e-12);
    }
    SUBCASE("eigenvalue sum equals the trace") {
        EnsembleSpec s = make(2, 50, 0.3);
        Eigen::MatrixXcd m = sample_matrix(s, 31, 0);
        auto eigs = spectrum(m);
        complex sum = 0.0;
        for (complex z : eigs) sum += z;
        CHECK(std::abs(sum - m.trace()) < 1e-8 * std::abs(m.trace()));
    }
    SUBCASE("residual contract on a verification subsample") {
        EnsembleSpec s = make(2, 40, 0.5);
        Eigen::MatrixXcd m = sample_matrix(s, 77, 3);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, true);
        double mnorm = m.norm();
        for (int i = 0; i < 5; ++i) {
            Eigen::VectorXcd v = es.eigenvectors().col(i);
            complex lam = es.eigenvalues()(i);
            CHECK((m * v - lam * v).norm() <= 1e-8 * mnorm);
        }
        // and the plain-spectrum eigenvalues agree with the solver's
        auto eigs = spectrum(m);
        auto sorted = [](std::vector<complex> v) {
            std::sort(v.begin(), v.end(), [](complex a, complex b) {
                return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
            return v;
        };
        std::vector<complex> ref(es.eigenvalues().data(),
                                 es.eigenvalues().data() + es.eigenvalues().size());
        auto e1 = sorted(eigs), e2 = sorted(ref);
        for (size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-9);
    }
}

TEST_CASE("edge_rescale") {
    EnsembleSpec s = make(2, 100, 0.5);
    double edge = 1.5 * 10.0;
    SUBCASE("edge point maps to zero") {
        std::vector<complex> eigs = {complex{edge, 0.0}};
        auto right = edge_rescale(eigs, s, Side::right);
        REQUIRE(right.size() == 1);
        CHECK(std::abs(right[0]) < 1e-12);
    }
    SUBCASE("left of -J equals right of J") {
        Eigen::MatrixXcd m = sample_matrix(s, 4, 0);
        auto eig_j = spectrum(m);
        Eigen::MatrixXcd mneg = -m;
        auto eig_neg = spectrum(mneg);
        auto a = edge_rescale(eig_j, s, Side::right);
        auto b = edge_rescale(eig_neg, s, Side::left);
        auto key = [](complex x, complex y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        };
        std::sort(a.begin(), a.end(), key);
        std::sort(b.begin(), b.end(), key);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
    }
    SUBCASE("retained fraction scales like N^{-1/3}") {
        // window 10 in microscopic units covers an O(N^{-1/3}) sliver of the
        // macroscopic ellipse area
        EnsembleSpec spec1 = make(2, 64, 0.0);
        SampleBatch b1 = sample_batch(spec1, 3, 40, 2);
        long kept = 0, total = 0;
        for (const auto& e : b1.eigenvalues) {
            kept += edge_rescale(e, spec1, Side::right).size();
            total += e.size();
        }
        double frac = static_cast<double>(kept) / total;
        // crude oracle: ellipse-area sliver of width ~2*window*N^{-2/3}
        // around the edge against total area pi (tau = 0, unit disc)
        double expect = std::pow(64.0, -1.0 / 3.0);
        CHECK(frac > 0.05 * expect);
        CHECK(frac < 3.0 * expect);
    }
}

TEST_CASE("beta = 4 spectra pair up and avoid the real axis") {
    EnsembleSpec s = make(4, 32, 0.2);
    SampleBatch batch = sample_batch(s, 17, 1000, 2);
    double worst_pair = 0.0;
    for (const auto& eigs : batch.eigenvalues) {
        CHECK(eigs.size() == 32);
        for (complex z : eigs) CHECK(std::abs(z.imag()) > 1e-10);
        // conjugation closure: match each eigenvalue to the nearest conjugate
        std::vector<complex> pool = eigs;
        for (complex z : eigs) {
            double best = 1e300;
            for (complex w : pool) best = std::min(best, std::abs(std::conj(w) - z));
            worst_pair = std::max(worst_pair, best);
        }
    }
    CHECK(worst_pair <= 1e-8 * std::sqrt(32.0));
}

TEST_CASE("beta = 1 spectra: conjugate pairing and macroscopic support") {
    EnsembleSpec s = make(1, 256, 0.5);
    SampleBatch batch = sample_batch(s, 23, 2, 2);
    long inside = 0, total = 0;
    for (const auto& eigs : batch.eigenvalues) {
        for (complex z : eigs) {
            complex scaled = z / std::sqrt(256.0);
            double ex = scaled.real() / (1.0 + s.tau + 0.1);
            double ey = scaled.imag() / (1.0 - s.tau + 0.1);
            inside += (ex * ex + ey * ey <= 1.0) ||
                      (std::abs(scaled.real()) <= 1.0 + s.tau + 0.1 &&
                       std::abs(scaled.imag()) <= 1.0 - s.tau + 0.1);
            ++total;
        }
        // non-real eigenvalues occur in conjugate pairs
        for (complex z : eigs) {
            if (std::abs(z.imag()) <= batch.real_axis_threshold()) continue;
            double best = 1e300;
            for (complex w : eigs) best = std::min(best, std::abs(std::conj(w) - z));
            CHECK(best <= 1e-8 * std::sqrt(256.0));
        }
    }
    CHECK(static_cast<double>(inside) / total >= 0.99);
}

TEST_CASE("seed determinism of batches") {
    EnsembleSpec s = make(1, 16, 0.3);
    SampleBatch a = sample_batch(s, 1234, 8, 2);
    SampleBatch b = sample_batch(s, 1234, 8, 1);
    for (int t = 0; t < 8; ++t) {
        REQUIRE(a.eigenvalues[t].size() == b.eigenvalues[t].size());
        for (size_t i = 0; i < a.eigenvalues[t].size(); ++i)
            CHECK(a.eigenvalues[t][i] == b.eigenvalues[t][i]);
    }
}

TEST_CASE("histograms") {
    EnsembleSpec s = make(2, 64, 0.5);
    SampleBatch b1 = sample_batch(s, 100, 30, 2);
    SampleBatch b2 = sample_batch(s, 200, 20, 2);

    SUBCASE("merge equals union") {
        EdgeHistogram h1 =
            accumulate_density(b1, -6, 2, 16, -3, 3, 12, Channel::complex_plane);
        EdgeHistogram h2 =
            accumulate_density(b2, -6, 2, 16, -3, 3, 12, Channel::complex_plane);
        SampleBatch both = b1;
        both.trials += b2.trials;
        both.eigenvalues.insert(both.eigenvalues.end(), b2.eigenvalues.begin(),
                                b2.eigenvalues.end());
        EdgeHistogram hu =
            accumulate_density(both, -6, 2, 16, -3, 3, 12, Channel::complex_plane);
        h1.merge(h2);
        CHECK(h1.total == hu.total);
        for (size_t i = 0; i < h1.counts.size(); ++i) CHECK(h1.counts[i] == hu.counts[i]);
    }
    SUBCASE("all-zero histogram when the window is empty") {
        EdgeHistogram h =
            accumulate_density(b1, 500, 501, 4, -1, 1, 4, Channel::complex_plane);
        CHECK(h.total == 0);
        for (double c : h.counts) CHECK(c == 0.0);
    }
    SUBCASE("real-axis channel usage") {
        CHECK_THROWS_AS(accumulate_density(b1, -6, 2, 16, 0, 0, 0, Channel::real_axis),
                        gek::structure_error);
        EnsembleSpec s4 = make(4, 16, 0.2);
        SampleBatch b4 = sample_batch(s4, 5, 10, 2);
        EdgeHistogram h4 = accumulate_density(b4, -6, 2, 16, 0, 0, 0, Channel::real_axis);
        CHECK(h4.total == 0); // repelled from the axis
    }
    SUBCASE("poisson errors") {
        EdgeHistogram h =
            accumulate_density(b1, -6, 2, 8, -3, 3, 6, Channel::complex_plane);
        for (int ix = 0; ix < h.nx; ++ix)
            for (int iy = 0; iy < h.ny; ++iy) {
                double c = h.counts[ix * h.ny + iy];
                CHECK(h.error(ix, iy) ==
                      doctest::Approx(std::sqrt(c) / h.normalization()));
            }
    }
}

TEST_CASE("gumbel fit recovers synthetic parameters") {
    TrialRng rng(2025, 0);
    std::vector<double> sample(20000);
    double mu = 3.2, beta = 0.45;
    for (double& v : sample) {
        double u = rng.uniform();
        u = std::max(u, 1e-15);
        v = mu - beta * std::log(-std::log(u));
    }
    GumbelFit fit = fit_gumbel(sample);
    CHECK(std::abs(fit.location - mu) < 0.02);
    CHECK(std::abs(fit.scale - beta) < 0.02);
    CHECK(fit.p_value > 0.01);

    // a uniform sample must be rejected decisively
    std::vector<double> uni(20000);
    for (double& v : uni) v = rng.uniform();
    GumbelFit bad = fit_gumbel(uni);
    CHECK(bad.p_value < 1e-4);
}

TEST_CASE("capacity and validation errors") {
    CHECK_THROWS_AS(sample_matrix(make(2, 513, 0.1), 1), gek::capacity_error);
    CHECK_THROWS_AS(gumbel_experiment(make(2, 16, 0.5), 1, 10),
                    std::domain_error);
}
