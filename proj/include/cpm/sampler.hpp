#pragma once

#include "cpm/ensemble.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cpm {

struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;  // size N - 1
};

// Eigenvalues of a symmetric tridiagonal matrix, ascending, by implicit QL with Wilkinson shifts.
std::vector<double> eigen_tridiagonal(const TridiagonalMatrix& T);

// Per-sample generator: a fixed function of (seed, index), independent of scheduling.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

// One draw of the eigenvalues under the spec's weight convention, ascending.
std::vector<double> sample_spectrum(const EnsembleSpec& spec, std::mt19937_64& rng);
std::vector<double> sample_spectrum(const EnsembleSpec& spec, std::uint64_t seed);

// Tridiagonal matrix model whose spectrum realizes the spec's ensemble (before the affine map for Jacobi).
TridiagonalMatrix sample_matrix_model(const EnsembleSpec& spec, std::mt19937_64& rng);

struct MCEstimate {
    double log_mean = 0.0;         // log of the arithmetic mean of prod |lam - x_l|^{2p}
    double log_mean_stderr = 0.0;  // delta method
    double jackknife_stderr = 0.0; // 100-block jackknife of log_mean
    long n_samples = 0;
    std::uint64_t seed = 0;
    double max_share = 0.0;  // largest single-sample share of the summed mass
    bool heavy_tail = false; // max_share >= 0.5
};

struct SignedMCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// threads = 0 uses the hardware concurrency; results are bit-identical for any thread count.
MCEstimate mc_moment(const EnsembleSpec& spec, const MomentQuery& q, long n_samples, std::uint64_t seed,
                     int threads = 1);

// Conditional (Rao-Blackwellized) estimator for the gaussian family: only the off-diagonal chi variables
// are sampled and the Gaussian diagonal is integrated out exactly, so the estimator is unbiased with
// variance no larger than mc_moment's. Throws UnsupportedError for other families.
MCEstimate mc_moment_conditional(const EnsembleSpec& spec, const MomentQuery& q, long n_samples, std::uint64_t seed,
                                 int threads = 1);
std::vector<double> mc_log_samples_conditional(const EnsembleSpec& spec, const MomentQuery& q, long n_samples,
                                               std::uint64_t seed, int threads = 1);

// Signed mean of prod (x - x_l) under the weight exp(-beta x^2 / 2).
SignedMCEstimate mc_signed_charpoly(int N, double beta, double x, long n_samples, std::uint64_t seed,
                                    int threads = 1);

// Per-sample values in sample order; exposed for diagnostics and tests.
std::vector<double> mc_log_samples(const EnsembleSpec& spec, const MomentQuery& q, long n_samples,
                                   std::uint64_t seed, int threads = 1);

} // namespace cpm
