#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "gek/finite_n.hpp"
#include "gek/numeric.hpp"

namespace gek::sampler {

using finite_n::EnsembleSpec;

enum class Side { right, left };
enum class Channel { complex_plane, real_axis };

// Counter-based per-trial RNG: stream = hash(seed, trial), so trials can be
// drawn in any order (and on any thread) with identical results.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial);
    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal, Box-Muller

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// One draw J = sqrt(1+tau) H + sqrt(1-tau) A from independent Gaussian
// matrices; entry statistics <|J_ij|^2> = 1, <J_ij J_ji> = tau.  beta = 1
// matrices are real (zero imaginary parts); beta = 4 matrices carry the
// quaternion block structure exactly.
Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t seed,
                               std::uint64_t trial = 0);

// All eigenvalues of a dense non-normal matrix.  Exactly-real input is routed
// through the real Schur solver so real eigenvalues come out with Im = 0.
std::vector<complex> spectrum(const Eigen::MatrixXcd& m);

// Microscopic edge coordinates Z = +-(z -+ (1+tau) sqrt(N)) N^{1/6},
// keeping |Z| <= window.
std::vector<complex> edge_rescale(std::span<const complex> eigs, const EnsembleSpec& spec,
                                  Side side, double window = 10.0);

struct SampleBatch {
    EnsembleSpec spec;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<std::vector<complex>> eigenvalues; // one list per trial

    // |Im z| threshold below which a beta = 1 eigenvalue counts as real
    double real_axis_threshold() const;
};

// Draw `trials` independent spectra with deterministic per-trial streams;
// trials are distributed over `threads` workers (0 = hardware concurrency).
SampleBatch sample_batch(const EnsembleSpec& spec, std::uint64_t seed, int trials,
                         int threads = 0);

struct EdgeHistogram {
    // uniform grid; ny == 0 means a 1-D real-axis histogram
    double xmin = 0, xmax = 0;
    int nx = 0;
    double ymin = 0, ymax = 0;
    int ny = 0;
    Channel channel = Channel::complex_plane;
    std::vector<double> counts; // nx * max(ny, 1)
    long long total = 0;        // retained eigenvalues
    long long trials = 0;

    double cell_measure() const;
    double normalization() const { return static_cast<double>(trials) * cell_measure(); }
    // density estimate and its Poisson error in microscopic units
    double density(int ix, int iy = 0) const;
    double error(int ix, int iy = 0) const;
    double x_center(int ix) const;
    double y_center(int iy) const;

    void merge(const EdgeHistogram& other);
};

// Bin the edge-rescaled spectra of a batch.  channel == real_axis is valid
// for beta = 1 (real eigenvalues only; 1-D) and beta = 4 (empty by
// construction); it is a usage error for beta = 2.
EdgeHistogram accumulate_density(const SampleBatch& batch, double xmin, double xmax, int nx,
                                 double ymin, double ymax, int ny, Channel channel,
                                 Side side = Side::right, double window = 10.0);

struct GumbelFit {
    double location = 0.0;
    double scale = 1.0;
    double ks_statistic = 0.0;
    double p_value = 0.0;
    int samples = 0;
};

// Largest-real-part experiment at maximal non-Hermiticity: fit a Gumbel law
// to the per-trial maxima by maximum likelihood and report the KS statistic
// against the fitted distribution.
GumbelFit gumbel_experiment(const EnsembleSpec& spec, std::uint64_t seed, int trials,
                            int threads = 0);

GumbelFit fit_gumbel(std::vector<double> maxima);

} // namespace gek::sampler
