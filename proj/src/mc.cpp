#include "ginibre/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "ginibre/errors.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre {

RealMatrix sample_elliptic(const EllipticParams& params, GaussianStream& rng) {
  const int N = params.N();
  const double tau = params.tau();
  const double v = params.v();
  const double sd_diag = std::sqrt(1.0 + tau);
  const double sd_off = std::sqrt(0.5 * (1.0 + tau));
  RealMatrix J(N, N);
  for (int i = 0; i < N; ++i) J(i, i) = sd_diag * rng();
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double s = sd_off * rng();
      const double a = sd_off * rng();
      J(i, j) = s + v * a;
      J(j, i) = s - v * a;
    }
  }
  return J;
}

ChiralSample sample_chiral(const ChiralParams& params, GaussianStream& rng) {
  const int rows = params.N();
  const int cols = params.N() + params.nu();
  const double sd = 1.0 / std::sqrt(params.n());
  ChiralSample out{RealMatrix(rows, cols), RealMatrix(rows, cols)};
  for (int i = 0; i < rows; ++i)
    for (int a = 0; a < cols; ++a) out.A(i, a) = sd * rng();
  for (int i = 0; i < rows; ++i)
    for (int a = 0; a < cols; ++a) out.B(i, a) = sd * rng();
  return out;
}

RealMatrix chiral_block_matrix(const ChiralSample& sample, double mu) {
  const auto N = sample.A.rows();
  const auto K = sample.A.cols();
  RealMatrix M = RealMatrix::Zero(N + K, N + K);
  M.topRightCorner(N, K) = sample.A + mu * sample.B;
  M.bottomLeftCorner(K, N) = sample.A.transpose() - mu * sample.B.transpose();
  return M;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta * delta * (na * nb / n);
  count_ += other.count_;
}

double MomentAccumulator::standard_error() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(count_));
}

ShardRange shard_range(std::int64_t samples, int shards, int shard) {
  const std::int64_t base = samples / shards;
  const std::int64_t extra = samples % shards;
  const std::int64_t begin = shard * base + std::min<std::int64_t>(shard, extra);
  return {begin, base + (shard < extra ? 1 : 0)};
}

int resolve_threads(int shards, int requested) {
  int threads = requested > 0 ? requested
                              : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GINIBRE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::clamp(threads, 1, std::max(1, shards));
}

std::complex<double> charpoly_product(const RealMatrix& J, std::complex<double> lambda,
                                      std::complex<double> gamma) {
  return shifted_determinant(J, lambda) * shifted_determinant(J, gamma, /*transpose=*/true);
}

std::complex<double> charpoly_product(const ChiralSample& sample, double mu,
                                      std::complex<double> lambda, std::complex<double> gamma,
                                      bool full_determinant) {
  if (full_determinant) {
    const RealMatrix M = chiral_block_matrix(sample, mu);
    return shifted_determinant(M, lambda) * shifted_determinant(M, gamma, /*transpose=*/true);
  }
  // det(lambda - M) = lambda^nu det(lambda^2 - C C~), C = A + mu B, C~ = A^T - mu B^T;
  // det(gamma - M^T) = gamma^nu det(gamma^2 - (C C~)^T).
  const int nu = static_cast<int>(sample.A.cols() - sample.A.rows());
  const RealMatrix W =
      (sample.A + mu * sample.B) * (sample.A.transpose() - mu * sample.B.transpose());
  return ipow(lambda * gamma, nu) * shifted_determinant(W, lambda * lambda) *
         shifted_determinant(W, gamma * gamma, /*transpose=*/true);
}

namespace {

struct ComplexMoments {
  MomentAccumulator re;
  MomentAccumulator im;
};

}  // namespace

MCEstimate mc_charpoly_product(const EnsembleParams& params, std::complex<double> lambda,
                               std::complex<double> gamma, std::int64_t samples,
                               std::uint64_t seed, int shards, McOptions opts) {
  if (samples < 1) throw ValidationError("mc_charpoly_product needs samples >= 1");
  if (shards < 1) throw ValidationError("shards must be >= 1");
  if (shards > samples) shards = static_cast<int>(samples);
  const int threads = resolve_threads(shards, opts.threads);

  auto body = [&](int shard, ShardRange range, ComplexMoments& acc) {
    for (std::int64_t i = 0; i < range.count; ++i) {
      GaussianStream rng(seed, static_cast<std::uint32_t>(shard), static_cast<std::uint64_t>(i));
      std::complex<double> value;
      if (const auto* e = std::get_if<EllipticParams>(&params)) {
        value = charpoly_product(sample_elliptic(*e, rng), lambda, gamma);
      } else {
        const auto& c = std::get<ChiralParams>(params);
        value = charpoly_product(sample_chiral(c, rng), c.mu(), lambda, gamma,
                                 opts.chiral_full_determinant);
      }
      if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw NumericalError("non-finite determinant product in shard " + std::to_string(shard) +
                             ", sample " + std::to_string(i));
      acc.re.add(value.real());
      acc.im.add(value.imag());
    }
  };
  const auto parts = run_sharded<ComplexMoments>(samples, shards, threads, body);

  ComplexMoments total;
  for (const auto& p : parts) {
    total.re.merge(p.re);
    total.im.merge(p.im);
  }
  MCEstimate est;
  est.mean = {total.re.mean(), total.im.mean()};
  est.stderr_re = total.re.standard_error();
  est.stderr_im = total.im.standard_error();
  est.stderr = std::max(est.stderr_re, est.stderr_im);
  est.samples = total.re.count();
  est.seed = seed;
  est.shards = shards;
  return est;
}

SpectrumSample classify_spectrum(const std::vector<std::complex<double>>& eigs, double tol) {
  SpectrumSample out;
  out.eigenvalues = eigs;
  out.classes.assign(eigs.size(), '?');
  if (tol <= 0.0) {
    double scale = 0.0;
    for (auto z : eigs) scale = std::max(scale, std::abs(z));
    tol = scale > 0.0 ? 1e-8 * scale : std::numeric_limits<double>::min();
  }
  out.tolerance = tol;

  const std::size_t n = eigs.size();
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(eigs[i]) <= tol) {
      out.classes[i] = 'Z';
      used[i] = true;
      ++out.zero_count;
    }
  }

  // Conjugate pairs: each upper-half eigenvalue takes its nearest unused
  // lower-half partner.
  auto pair_with = [&](double limit) {
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || eigs[i].imag() <= tol) continue;
      std::size_t best = n;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j] || j == i || eigs[j].imag() >= 0.0) continue;
        const double d = std::abs(eigs[i] - std::conj(eigs[j]));
        if (d < best_dist) {
          best_dist = d;
          best = j;
        }
      }
      if (best < n && best_dist <= limit) {
        used[i] = used[best] = true;
        out.classes[i] = out.classes[best] = 'C';
        out.conj_pairs.push_back(eigs[i]);
        out.pairing_residual = std::max(out.pairing_residual, best_dist);
      }
    }
  };
  pair_with(tol);

  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i] && std::abs(eigs[i].imag()) <= tol) {
      used[i] = true;
      out.classes[i] = 'R';
      out.real_eigs.push_back(eigs[i].real());
      out.pairing_residual = std::max(out.pairing_residual, std::abs(eigs[i].imag()));
    }
  }

  // Leftovers: accept with the relaxed tolerance, otherwise fail.
  pair_with(100.0 * tol);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    if (std::abs(eigs[i].imag()) <= 100.0 * tol) {
      used[i] = true;
      out.classes[i] = 'R';
      out.real_eigs.push_back(eigs[i].real());
      out.pairing_residual = std::max(out.pairing_residual, std::abs(eigs[i].imag()));
      continue;
    }
    throw ClassificationError("eigenvalue (" + std::to_string(eigs[i].real()) + ", " +
                              std::to_string(eigs[i].imag()) +
                              ") has no conjugate partner and is not real within 100*tol");
  }
  return out;
}

double plus_minus_residual(const std::vector<std::complex<double>>& eigs, double zero_tol) {
  const std::size_t n = eigs.size();
  std::vector<bool> used(n, false);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || std::abs(eigs[i]) <= zero_tol) continue;
    used[i] = true;
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || std::abs(eigs[j]) <= zero_tol) continue;
      const double d = std::abs(eigs[i] + eigs[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == n) return std::numeric_limits<double>::infinity();
    used[best] = true;
    residual = std::max(residual, best_dist);
  }
  return residual;
}

RealMatrix sample_matrix(const EnsembleParams& params, GaussianStream& rng) {
  if (const auto* e = std::get_if<EllipticParams>(&params)) return sample_elliptic(*e, rng);
  const auto& c = std::get<ChiralParams>(params);
  return chiral_block_matrix(sample_chiral(c, rng), c.mu());
}

namespace {

struct ShardSpectra {
  std::vector<SpectrumSample> records;
  SpectrumSummary summary;
  std::int64_t outside = 0;
};

template <class E>
[[noreturn]] void rethrow_with_index(const E& e, std::int64_t index) {
  throw E("sample " + std::to_string(index) + ": " + e.what());
}

}  // namespace

SpectrumSummary spectrum_ensemble(const EnsembleParams& params, std::int64_t samples,
                                  std::uint64_t seed, int shards, SpectrumOptions opts,
                                  const SpectrumSink& sink) {
  if (samples < 1) throw ValidationError("spectrum_ensemble needs samples >= 1");
  if (shards < 1) throw ValidationError("shards must be >= 1");
  if (shards > samples) shards = static_cast<int>(samples);
  const int threads = resolve_threads(shards, opts.threads);

  const auto* elliptic = std::get_if<EllipticParams>(&params);
  double axis_re = std::numeric_limits<double>::quiet_NaN();
  double axis_im = std::numeric_limits<double>::quiet_NaN();
  if (elliptic) {
    const double root_n = std::sqrt(static_cast<double>(elliptic->N()));
    axis_re = root_n * (1.0 + elliptic->tau()) * (1.0 + opts.margin);
    axis_im = root_n * (1.0 - elliptic->tau()) * (1.0 + opts.margin);
  }
  auto outside_ellipse = [&](std::complex<double> z, double tol) {
    if (axis_im <= 0.0) return std::abs(z.imag()) > tol || std::abs(z.real()) > axis_re;
    const double x = z.real() / axis_re;
    const double y = z.imag() / axis_im;
    return x * x + y * y > 1.0;
  };

  auto body = [&](int shard, ShardRange range, ShardSpectra& out) {
    auto& s = out.summary;
    s.min_zero_count = std::numeric_limits<int>::max();
    s.max_zero_count = 0;
    for (std::int64_t i = 0; i < range.count; ++i) {
      const std::int64_t index = range.begin + i;
      try {
        GaussianStream rng(seed, static_cast<std::uint32_t>(shard), static_cast<std::uint64_t>(i));
        const RealMatrix M = sample_matrix(params, rng);
        const double norm = spectral_norm(M);
        SpectrumSample rec = classify_spectrum(eigvals(M), opts.tol);
        s.samples += 1;
        s.eigenvalues += static_cast<std::int64_t>(rec.eigenvalues.size());
        s.real_count += static_cast<std::int64_t>(rec.real_eigs.size());
        s.pair_count += static_cast<std::int64_t>(rec.conj_pairs.size());
        s.zero_count += rec.zero_count;
        s.min_zero_count = std::min(s.min_zero_count, rec.zero_count);
        s.max_zero_count = std::max(s.max_zero_count, rec.zero_count);
        if (norm > 0.0) {
          s.max_pairing_residual = std::max(s.max_pairing_residual, rec.pairing_residual / norm);
          if (!elliptic) {
            s.max_chiral_residual = std::max(
                s.max_chiral_residual, plus_minus_residual(rec.eigenvalues, rec.tolerance) / norm);
          }
        }
        if (elliptic) {
          for (auto z : rec.eigenvalues)
            if (outside_ellipse(z, rec.tolerance)) ++out.outside;
        }
        if (sink) out.records.push_back(std::move(rec));
      } catch (const ClassificationError& e) {
        rethrow_with_index(e, index);
      } catch (const ConvergenceError& e) {
        rethrow_with_index(e, index);
      } catch (const NumericalError& e) {
        rethrow_with_index(e, index);
      }
    }
  };
  auto parts = run_sharded<ShardSpectra>(samples, shards, threads, body);

  SpectrumSummary total;
  total.min_zero_count = std::numeric_limits<int>::max();
  std::int64_t outside = 0;
  std::int64_t index = 0;
  for (auto& p : parts) {
    const auto& s = p.summary;
    total.samples += s.samples;
    total.eigenvalues += s.eigenvalues;
    total.real_count += s.real_count;
    total.pair_count += s.pair_count;
    total.zero_count += s.zero_count;
    total.min_zero_count = std::min(total.min_zero_count, s.min_zero_count);
    total.max_zero_count = std::max(total.max_zero_count, s.max_zero_count);
    total.max_pairing_residual = std::max(total.max_pairing_residual, s.max_pairing_residual);
    total.max_chiral_residual = std::max(total.max_chiral_residual, s.max_chiral_residual);
    outside += p.outside;
    if (sink)
      for (const auto& rec : p.records) sink(index++, rec);
  }
  const double n_eigs = static_cast<double>(std::max<std::int64_t>(1, total.eigenvalues));
  total.fraction_real = static_cast<double>(total.real_count) / n_eigs;
  total.mean_zero_count = static_cast<double>(total.zero_count) / static_cast<double>(total.samples);
  total.semi_axis_re = axis_re;
  total.semi_axis_im = axis_im;
  total.outside_fraction =
      elliptic ? static_cast<double>(outside) / n_eigs : std::numeric_limits<double>::quiet_NaN();
  if (elliptic) total.max_chiral_residual = std::numeric_limits<double>::quiet_NaN();
  return total;
}

}  // namespace ginibre
