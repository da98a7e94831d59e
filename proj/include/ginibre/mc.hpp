#pragma once

// Monte-Carlo ground truth for both ensembles: samplers, streaming estimators
// of <det(lambda - M) det(gamma - M^T)>, and spectrum classification.

#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "ginibre/linalg.hpp"
#include "ginibre/params.hpp"
#include "ginibre/rng.hpp"

namespace ginibre {

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// J = S + vA. S symmetric with Var(S_ii) = 1 + tau, Var(S_ij) = (1 + tau)/2;
/// A antisymmetric with Var(A_ij) = (1 + tau)/2. Hence Var(J_ij) = 1 and
/// <J_ij J_ji> = tau off the diagonal.
RealMatrix sample_elliptic(const EllipticParams& params, GaussianStream& rng);

struct ChiralSample {
  RealMatrix A;  // N x (N + nu)
  RealMatrix B;  // N x (N + nu)
};

/// A and B with i.i.d. N(0, 1/n) entries; A is drawn first, then B.
/// mu does not enter.
ChiralSample sample_chiral(const ChiralParams& params, GaussianStream& rng);

/// M = [[0, A + mu B], [A^T - mu B^T, 0]] of size 2N + nu.
RealMatrix chiral_block_matrix(const ChiralSample& sample, double mu);

// ---------------------------------------------------------------------------
// Streaming moments
// ---------------------------------------------------------------------------

/// Welford accumulator for one real component.
class MomentAccumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  /// Exact pairwise combination (Chan et al.).
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance, 0 for fewer than two samples.
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double standard_error() const;

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MCEstimate {
  std::complex<double> mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  /// max(stderr_re, stderr_im)
  double stderr = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int shards = 1;
};

// ---------------------------------------------------------------------------
// Sharding
// ---------------------------------------------------------------------------

/// Samples assigned to shard s: the first (samples % shards) shards take one extra.
struct ShardRange {
  std::int64_t begin;
  std::int64_t count;
};
ShardRange shard_range(std::int64_t samples, int shards, int shard);

/// Worker threads to use for `shards` shards: min(shards, hardware threads),
/// further capped by the GINIBRE_THREADS environment variable when set.
int resolve_threads(int shards, int requested = 0);

/// Runs body(shard, range, state) for every shard on up to `threads` threads and
/// returns the per-shard states in shard order. The first exception (by shard
/// index) is rethrown after all workers finish.
template <class State, class Body>
std::vector<State> run_sharded(std::int64_t samples, int shards, int threads, Body body) {
  std::vector<State> states(static_cast<std::size_t>(shards));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(shards));
  auto run_one = [&](int s) {
    try {
      body(s, shard_range(samples, shards, s), states[s]);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (threads <= 1 || shards == 1) {
    for (int s = 0; s < shards; ++s) run_one(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int s = t; s < shards; s += threads) run_one(s);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return states;
}

// ---------------------------------------------------------------------------
// Characteristic-polynomial products
// ---------------------------------------------------------------------------

struct McOptions {
  /// Chiral only: evaluate det(lambda - M) on the full (2N + nu) matrix instead
  /// of the reduced lambda^nu det(lambda^2 - C C~) form.
  bool chiral_full_determinant = false;
  /// 0 = automatic (see resolve_threads).
  int threads = 0;
};

/// det(lambda - J) det(gamma - J^T) for one elliptic sample.
std::complex<double> charpoly_product(const RealMatrix& J, std::complex<double> lambda,
                                      std::complex<double> gamma);

/// det(lambda - M) det(gamma - M^T) for one chiral sample.
std::complex<double> charpoly_product(const ChiralSample& sample, double mu,
                                      std::complex<double> lambda, std::complex<double> gamma,
                                      bool full_determinant = false);

/// Streaming Monte-Carlo estimate of <det(lambda - M) det(gamma - M^T)>.
/// Deterministic in (params, lambda, gamma, samples, seed, shards).
MCEstimate mc_charpoly_product(const EnsembleParams& params, std::complex<double> lambda,
                               std::complex<double> gamma, std::int64_t samples,
                               std::uint64_t seed, int shards = 1, McOptions opts = {});

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

struct SpectrumSample {
  std::vector<std::complex<double>> eigenvalues;
  /// 'R', 'C' or 'Z' per eigenvalue, aligned with `eigenvalues`.
  std::vector<char> classes;
  std::vector<double> real_eigs;
  /// Upper-half-plane representative of each conjugate pair.
  std::vector<std::complex<double>> conj_pairs;
  int zero_count = 0;
  /// Largest |lambda - conj(partner)| over accepted pairs and largest |Im| over
  /// eigenvalues classified real.
  double pairing_residual = 0.0;
  double tolerance = 0.0;
};

/// Splits eigenvalues of a real matrix into exact zeros, real eigenvalues and
/// complex-conjugate pairs. tol <= 0 selects 1e-8 * max|lambda|.
/// Throws ClassificationError if an eigenvalue is neither pairable nor
/// near-real within 100 * tol.
SpectrumSample classify_spectrum(const std::vector<std::complex<double>>& eigs, double tol = 0.0);

/// Largest distance between a non-zero eigenvalue and the nearest unmatched
/// -lambda partner (greedy matching). Eigenvalues with |lambda| <= zero_tol are skipped.
double plus_minus_residual(const std::vector<std::complex<double>>& eigs, double zero_tol);

/// Samples one matrix from `rng` and returns it (the full block matrix M for chiral).
RealMatrix sample_matrix(const EnsembleParams& params, GaussianStream& rng);

struct SpectrumOptions {
  /// Relative inflation of the elliptic-law support ellipse.
  double margin = 0.05;
  /// Classification tolerance; <= 0 selects the default.
  double tol = 0.0;
  int threads = 0;
};

struct SpectrumSummary {
  std::int64_t samples = 0;
  std::int64_t eigenvalues = 0;
  std::int64_t real_count = 0;
  std::int64_t pair_count = 0;
  std::int64_t zero_count = 0;
  double fraction_real = 0.0;
  double mean_zero_count = 0.0;
  /// Elliptic only (NaN for chiral): fraction of eigenvalues outside the
  /// ellipse with semi-axes sqrt(N)(1 +- tau)(1 + margin).
  double outside_fraction = 0.0;
  double semi_axis_re = 0.0;
  double semi_axis_im = 0.0;
  /// Largest conjugate-pairing residual divided by ||M||_2.
  double max_pairing_residual = 0.0;
  /// Chiral only (NaN for elliptic): largest +- pairing residual / ||M||_2.
  double max_chiral_residual = 0.0;
  /// Smallest / largest per-sample zero count.
  int min_zero_count = 0;
  int max_zero_count = 0;
};

using SpectrumSink = std::function<void(std::int64_t sample_index, const SpectrumSample&)>;

/// Samples, diagonalizes and classifies `samples` matrices. Records are passed
/// to `sink` (if any) in sample-index order after all shards finish.
/// Errors are rethrown with the failing sample index in the message.
SpectrumSummary spectrum_ensemble(const EnsembleParams& params, std::int64_t samples,
                                  std::uint64_t seed, int shards, SpectrumOptions opts = {},
                                  const SpectrumSink& sink = {});

}  // namespace ginibre
