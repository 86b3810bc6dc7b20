#include "gek/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "gek/errors.hpp"

namespace gek::sampler {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void check_capacity(const EnsembleSpec& spec) {
    spec.validate();
    if ((spec.beta == 1 || spec.beta == 2) && spec.n > 512)
        throw capacity_error("sample_matrix: n exceeds 512");
    if (spec.beta == 4 && spec.n > 512)
        throw capacity_error("sample_matrix: n exceeds 512 (256 quaternion pairs)");
}

} // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t mix = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1));
    for (auto& word : s_) word = splitmix64(mix);
}

std::uint64_t TrialRng::next_u64() {
    // xoshiro256++
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double TrialRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double TrialRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t seed,
                               std::uint64_t trial) {
    check_capacity(spec);
    TrialRng rng(seed, trial);
    int n = spec.n;
    double ch = std::sqrt(1.0 + spec.tau); // Hermitian part coefficient
    double ca = std::sqrt(1.0 - spec.tau); // anti-Hermitian part coefficient

    if (spec.beta == 1) {
        Eigen::MatrixXd g(n, n), gp(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) gp(i, j) = rng.normal();
        Eigen::MatrixXd j = 0.5 * ch * (g + g.transpose()) + 0.5 * ca * (gp - gp.transpose());
        return j.cast<complex>();
    }

    if (spec.beta == 2) {
        Eigen::MatrixXcd g(n, n), gp(n, n);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g(i, j) = complex{rng.normal(), rng.normal()} * inv_sqrt2;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                gp(i, j) = complex{rng.normal(), rng.normal()} * inv_sqrt2;
        return 0.5 * ch * (g + g.adjoint()) + 0.5 * ca * (gp - gp.adjoint());
    }

    // beta = 4: n/2 quaternion pairs as 2x2 blocks [[a, b], [-conj b, conj a]]
    int m = n / 2;
    auto quaternion_ginibre = [&]() {
        Eigen::MatrixXcd q(n, n);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                complex a{rng.normal(), rng.normal()};
                complex b{rng.normal(), rng.normal()};
                a *= inv_sqrt2;
                b *= inv_sqrt2;
                q(2 * i, 2 * j) = a;
                q(2 * i, 2 * j + 1) = b;
                q(2 * i + 1, 2 * j) = -std::conj(b);
                q(2 * i + 1, 2 * j + 1) = std::conj(a);
            }
        return q;
    };
    Eigen::MatrixXcd q = quaternion_ginibre();
    Eigen::MatrixXcd qp = quaternion_ginibre();
    return 0.5 * ch * (q + q.adjoint()) + 0.5 * ca * (qp - qp.adjoint());
}

std::vector<complex> spectrum(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw structure_error("spectrum: matrix must be square");
    if (!m.allFinite()) throw structure_error("spectrum: matrix has non-finite entries");

    bool real_matrix = (m.imag().cwiseAbs().maxCoeff() == 0.0);
    std::vector<complex> out;
    out.reserve(m.rows());
    if (real_matrix) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success)
            throw convergence_error("spectrum: real Schur iteration failed");
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            out.push_back(es.eigenvalues()(i));
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success)
            throw convergence_error("spectrum: QR iteration failed");
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            out.push_back(es.eigenvalues()(i));
    }
    return out;
}

std::vector<complex> edge_rescale(std::span<const complex> eigs, const EnsembleSpec& spec,
                                  Side side, double window) {
    double edge = (1.0 + spec.tau) * std::sqrt(static_cast<double>(spec.n));
    double mag = std::pow(static_cast<double>(spec.n), 1.0 / 6.0);
    std::vector<complex> out;
    for (complex z : eigs) {
        complex base = (side == Side::right) ? z : -z;
        complex Z = (base - edge) * mag;
        if (std::abs(Z) <= window) out.push_back(Z);
    }
    return out;
}

double SampleBatch::real_axis_threshold() const {
    return 1e-8 * std::sqrt(static_cast<double>(spec.n));
}

SampleBatch sample_batch(const EnsembleSpec& spec, std::uint64_t seed, int trials,
                         int threads) {
    check_capacity(spec);
    if (trials < 1) throw std::domain_error("sample_batch: trials must be >= 1");
    SampleBatch batch;
    batch.spec = spec;
    batch.seed = seed;
    batch.trials = trials;
    batch.eigenvalues.resize(trials);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, trials));

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        while (true) {
            int t = next.fetch_add(1);
            if (t >= trials || failed.load()) return;
            try {
                batch.eigenvalues[t] = spectrum(sample_matrix(spec, seed, t));
            } catch (...) {
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw convergence_error("sample_batch: a trial failed to diagonalise");
    return batch;
}

double EdgeHistogram::cell_measure() const {
    double dx = (xmax - xmin) / nx;
    if (ny == 0) return dx;
    return dx * (ymax - ymin) / ny;
}

double EdgeHistogram::density(int ix, int iy) const {
    return counts[ix * std::max(ny, 1) + iy] / normalization();
}

double EdgeHistogram::error(int ix, int iy) const {
    return std::sqrt(counts[ix * std::max(ny, 1) + iy]) / normalization();
}

double EdgeHistogram::x_center(int ix) const {
    return xmin + (ix + 0.5) * (xmax - xmin) / nx;
}

double EdgeHistogram::y_center(int iy) const {
    if (ny == 0) return 0.0;
    return ymin + (iy + 0.5) * (ymax - ymin) / ny;
}

void EdgeHistogram::merge(const EdgeHistogram& other) {
    if (nx != other.nx || ny != other.ny || xmin != other.xmin || xmax != other.xmax ||
        ymin != other.ymin || ymax != other.ymax || channel != other.channel)
        throw structure_error("EdgeHistogram::merge: incompatible grids");
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
    trials += other.trials;
}

EdgeHistogram accumulate_density(const SampleBatch& batch, double xmin, double xmax, int nx,
                                 double ymin, double ymax, int ny, Channel channel, Side side,
                                 double window) {
    if (nx < 1 || xmax <= xmin) throw std::domain_error("accumulate_density: bad x grid");
    if (channel == Channel::real_axis) {
        if (batch.spec.beta == 2)
            throw structure_error("accumulate_density: beta = 2 has no real-axis channel");
        ny = 0;
    } else if (ny < 1 || ymax <= ymin) {
        throw std::domain_error("accumulate_density: bad y grid");
    }

    EdgeHistogram h;
    h.xmin = xmin;
    h.xmax = xmax;
    h.nx = nx;
    h.ymin = ymin;
    h.ymax = ymax;
    h.ny = ny;
    h.channel = channel;
    h.counts.assign(static_cast<size_t>(nx) * std::max(ny, 1), 0.0);
    h.trials = batch.trials;

    double thresh = batch.real_axis_threshold();
    double dx = (xmax - xmin) / nx;
    double dy = (ny > 0) ? (ymax - ymin) / ny : 0.0;

    for (const auto& trial_eigs : batch.eigenvalues) {
        // classify on the unscaled eigenvalues, then rescale
        std::vector<complex> keep;
        keep.reserve(trial_eigs.size());
        for (complex z : trial_eigs) {
            bool is_real = std::abs(z.imag()) <= thresh;
            if (channel == Channel::real_axis) {
                if (is_real) keep.push_back({z.real(), 0.0});
            } else {
                if (batch.spec.beta == 1 && is_real) continue; // real channel handles these
                keep.push_back(z);
            }
        }
        for (complex Z : edge_rescale(keep, batch.spec, side, window)) {
            int ix = static_cast<int>(std::floor((Z.real() - xmin) / dx));
            if (ix < 0 || ix >= nx) continue;
            if (ny == 0) {
                h.counts[ix] += 1.0;
                h.total += 1;
            } else {
                int iy = static_cast<int>(std::floor((Z.imag() - ymin) / dy));
                if (iy < 0 || iy >= ny) continue;
                h.counts[ix * ny + iy] += 1.0;
                h.total += 1;
            }
        }
    }
    return h;
}

GumbelFit fit_gumbel(std::vector<double> maxima) {
    int n = static_cast<int>(maxima.size());
    if (n < 8) throw std::domain_error("fit_gumbel: need at least 8 samples");
    std::sort(maxima.begin(), maxima.end());
    double mean = 0.0;
    for (double v : maxima) mean += v;
    mean /= n;

    // MLE for the scale: b = mean - sum x e^{-x/b} / sum e^{-x/b}
    // solved by bisection on a bracketed monotone residual
    auto residual = [&](double b) {
        double num = 0.0, den = 0.0;
        for (double v : maxima) {
            double w = std::exp(-(v - mean) / b);
            num += v * w;
            den += w;
        }
        return b - mean + num / den;
    };
    double var = 0.0;
    for (double v : maxima) var += (v - mean) * (v - mean);
    var /= n;
    double b_moment = std::sqrt(6.0 * var) / M_PI;
    double lo = b_moment / 10.0, hi = b_moment * 10.0;
    double flo = residual(lo);
    for (int i = 0; i < 200 && residual(hi) * flo > 0.0; ++i) hi *= 1.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (residual(mid) * flo <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double b = 0.5 * (lo + hi);

    double acc = 0.0;
    for (double v : maxima) acc += std::exp(-(v - mean) / b);
    double mu = mean - b * std::log(acc / n);

    // Kolmogorov-Smirnov statistic against the fitted CDF
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = std::exp(-std::exp(-(maxima[i] - mu) / b));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    p = std::min(1.0, std::max(0.0, p));

    GumbelFit fit;
    fit.location = mu;
    fit.scale = b;
    fit.ks_statistic = d;
    fit.p_value = p;
    fit.samples = n;
    return fit;
}

GumbelFit gumbel_experiment(const EnsembleSpec& spec, std::uint64_t seed, int trials,
                            int threads) {
    if (spec.tau != 0.0)
        throw std::domain_error("gumbel_experiment: requires tau = 0 (maximal non-Hermiticity)");
    SampleBatch batch = sample_batch(spec, seed, trials, threads);
    std::vector<double> maxima(trials);
    for (int t = 0; t < trials; ++t) {
        double mx = -1e300;
        for (complex z : batch.eigenvalues[t]) mx = std::max(mx, z.real());
        maxima[t] = mx;
    }
    return fit_gumbel(std::move(maxima));
}

} // namespace gek::sampler
