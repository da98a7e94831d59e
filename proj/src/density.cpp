#include "ginibre/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ginibre/errors.hpp"
#include "ginibre/kernel_chiral.hpp"
#include "ginibre/kernel_ginibre.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/rng.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre {

namespace {

// exp(x^2) erfc(x) for x >= 0.
double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; at x >= 25 four terms are accurate to ~1e-16.
  const double inv2 = 1.0 / (2.0 * x * x);
  const double series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
  return series / (x * std::sqrt(std::numbers::pi));
}

struct GaussLegendre {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p0 / dp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

DensityGrid empty_grid(const GridSpec& grid) {
  grid.validate();
  DensityGrid out;
  out.spec = grid;
  for (int r = 0; r < grid.re_bins; ++r) out.re_axis.push_back(grid.re_min + (r + 0.5) * grid.re_width());
  for (int i = 0; i < grid.im_bins; ++i) out.im_axis.push_back(grid.im_min + (i + 0.5) * grid.im_width());
  out.values.assign(static_cast<std::size_t>(grid.re_bins) * grid.im_bins, 0.0);
  return out;
}

void normalize_unit_mass(DensityGrid& g) {
  double mass = 0.0;
  for (double v : g.values) mass += v;
  mass *= g.spec.cell_area();
  if (mass > 0.0)
    for (double& v : g.values) v /= mass;
  g.normalization = Normalization::UnitMass;
}

template <class PointFn>
DensityGrid evaluate_grid(const GridSpec& grid, const DensityOptions& opts, PointFn point) {
  if (opts.cell_order < 1) throw ValidationError("cell_order must be >= 1");
  DensityGrid out = empty_grid(grid);
  const GaussLegendre rule = gauss_legendre(opts.cell_order);
  const double hr = 0.5 * grid.re_width();
  const double hi = 0.5 * grid.im_width();
  for (int i = 0; i < grid.im_bins; ++i) {
    for (int r = 0; r < grid.re_bins; ++r) {
      double v = 0.0;
      if (opts.cell_order == 1) {
        v = point({out.re_axis[r], out.im_axis[i]});
      } else {
        for (int a = 0; a < opts.cell_order; ++a)
          for (int b = 0; b < opts.cell_order; ++b)
            v += rule.weights[a] * rule.weights[b] *
                 point({out.re_axis[r] + hr * rule.nodes[a], out.im_axis[i] + hi * rule.nodes[b]});
        v *= 0.25;
      }
      if (!std::isfinite(v) || v < 0.0)
        throw NumericalError("density evaluated to a negative or non-finite value");
      out.at(i, r) = v;
    }
  }
  if (opts.normalization == Normalization::UnitMass) normalize_unit_mass(out);
  return out;
}

}  // namespace

double ginibre_pair_weight(std::complex<double> z) {
  const double x = z.real();
  const double y = std::abs(z.imag());
  // erfc(sqrt2 y) e^{y^2 - x^2} = erfcx(sqrt2 y) e^{-y^2 - x^2}
  return erfcx(std::numbers::sqrt2 * y) * std::exp(-y * y - x * x);
}

void GridSpec::validate() const {
  if (re_bins < 1 || im_bins < 1) throw ValidationError("grid needs at least one bin per axis");
  if (!(re_max > re_min) || !(im_max > im_min))
    throw ValidationError("grid bounds must be strictly increasing");
}

WeightRegistry WeightRegistry::with_defaults() {
  WeightRegistry reg;
  reg.add({"ginibre", ginibre_pair_weight});
  reg.add({"identity", [](std::complex<double>) { return 1.0; }});
  return reg;
}

void WeightRegistry::add(WeightFunction weight) {
  if (weight.id.empty() || !weight.eval) throw ValidationError("weight needs an id and a function");
  GaussianStream rng(0x5eed'0f'a11ULL, 0, 0);
  for (int k = 0; k < 100; ++k) {
    const std::complex<double> z(2.0 * rng(), 2.0 * rng());
    const double a = weight.eval(z);
    const double b = weight.eval(std::conj(z));
    if (!std::isfinite(a) || a < 0.0)
      throw ValidationError("weight '" + weight.id + "' is negative or non-finite");
    if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)))
      throw ValidationError("weight '" + weight.id + "' is not symmetric under conjugation");
  }
  const std::string id = weight.id;
  weights_[id] = std::move(weight);
}

const WeightFunction& WeightRegistry::get(const std::string& id) const {
  auto it = weights_.find(id);
  if (it == weights_.end()) throw ValidationError("unknown weight id '" + id + "'");
  return it->second;
}

std::vector<std::string> WeightRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, w] : weights_) out.push_back(id);
  return out;
}

double elliptic_density_point(std::complex<double> z, const EllipticParams& params,
                              const WeightFunction& weight) {
  if (z.imag() == 0.0) return 0.0;
  const KernelValue f = f_elliptic(z, std::conj(z), params);
  const double scaled = f.value.real() * std::exp(f.log_prefactor - log_factorial(params.N()));
  return 2.0 * std::abs(z.imag()) * weight.eval(z) * scaled;
}

double chiral_density_point(std::complex<double> z, const ChiralParams& params,
                            const WeightFunction& weight) {
  if (z.imag() == 0.0) return 0.0;
  const KernelValue f = f_chiral(z, std::conj(z), params);
  const double log_norm = log_factorial(params.N()) + log_factorial(params.N() + params.nu());
  const double scaled = std::abs(f.value.real()) * std::exp(f.log_prefactor - log_norm);
  return 2.0 * std::abs(z.imag()) * weight.eval(z) * scaled;
}

DensityGrid complex_density_elliptic(const GridSpec& grid, const EllipticParams& params,
                                     const WeightFunction& weight, DensityOptions opts) {
  DensityGrid out = evaluate_grid(
      grid, opts, [&](std::complex<double> z) { return elliptic_density_point(z, params, weight); });
  out.label = (weight.id == "ginibre" && params.tau() == 0.0)
                  ? "complex eigenvalue density (kernel x weight)"
                  : "unnormalized kernel magnitude, weight=" + weight.id;
  return out;
}

DensityGrid complex_density_chiral(const GridSpec& grid, const ChiralParams& params,
                                   const WeightFunction& weight, DensityOptions opts) {
  DensityGrid out = evaluate_grid(
      grid, opts, [&](std::complex<double> z) { return chiral_density_point(z, params, weight); });
  out.label = "unnormalized kernel magnitude, weight=" + weight.id;
  return out;
}

namespace {

struct HistogramShard {
  std::vector<std::int64_t> counts;
  std::int64_t total_complex = 0;
};

}  // namespace

DensityGrid mc_density_histogram(const EnsembleParams& params, std::int64_t samples,
                                 const GridSpec& grid, std::uint64_t seed, int shards) {
  if (samples < 1) throw ValidationError("histogram needs samples >= 1");
  if (shards < 1) throw ValidationError("shards must be >= 1");
  if (shards > samples) shards = static_cast<int>(samples);
  DensityGrid out = empty_grid(grid);
  const std::size_t cells = out.values.size();

  auto body = [&](int shard, ShardRange range, HistogramShard& acc) {
    acc.counts.assign(cells, 0);
    for (std::int64_t i = 0; i < range.count; ++i) {
      GaussianStream rng(seed, static_cast<std::uint32_t>(shard), static_cast<std::uint64_t>(i));
      SpectrumSample rec;
      try {
        rec = classify_spectrum(eigvals(sample_matrix(params, rng)));
      } catch (const NumericalError& e) {
        throw NumericalError("sample " + std::to_string(range.begin + i) + ": " + e.what());
      }
      for (std::size_t k = 0; k < rec.eigenvalues.size(); ++k) {
        if (rec.classes[k] != 'C') continue;
        ++acc.total_complex;
        const auto z = rec.eigenvalues[k];
        const double fr = (z.real() - grid.re_min) / grid.re_width();
        const double fi = (z.imag() - grid.im_min) / grid.im_width();
        if (fr < 0.0 || fi < 0.0 || fr >= grid.re_bins || fi >= grid.im_bins) continue;
        ++acc.counts[static_cast<std::size_t>(fi) * grid.re_bins + static_cast<std::size_t>(fr)];
      }
    }
  };
  const auto parts =
      run_sharded<HistogramShard>(samples, shards, resolve_threads(shards), body);

  out.counts.assign(cells, 0);
  for (const auto& p : parts) {
    for (std::size_t c = 0; c < cells; ++c) out.counts[c] += p.counts[c];
    out.total_complex += p.total_complex;
  }
  std::int64_t in_grid = 0;
  for (auto c : out.counts) in_grid += c;
  if (in_grid > 0) {
    const double norm = 1.0 / (static_cast<double>(in_grid) * grid.cell_area());
    for (std::size_t c = 0; c < cells; ++c) out.values[c] = static_cast<double>(out.counts[c]) * norm;
  }
  out.normalization = Normalization::UnitMass;
  out.label = "Monte-Carlo histogram of complex eigenvalues";
  return out;
}

DensityComparison compare_density(const DensityGrid& closed, const DensityGrid& histogram,
                                  std::int64_t min_count) {
  if (closed.values.size() != histogram.values.size() ||
      histogram.counts.size() != histogram.values.size())
    throw ValidationError("compare_density needs a closed-form grid and a histogram on the same grid");
  double num = 0.0, den = 0.0;
  DensityComparison cmp;
  for (std::size_t c = 0; c < closed.values.size(); ++c) {
    if (histogram.counts[c] < min_count) continue;
    num += histogram.values[c] * closed.values[c];
    den += closed.values[c] * closed.values[c];
    ++cmp.cells_used;
  }
  if (cmp.cells_used == 0) return cmp;
  cmp.constant = num / den;
  for (std::size_t c = 0; c < closed.values.size(); ++c) {
    if (histogram.counts[c] < min_count) continue;
    const double dev =
        std::abs(cmp.constant * closed.values[c] - histogram.values[c]) / histogram.values[c];
    cmp.max_relative_deviation = std::max(cmp.max_relative_deviation, dev);
  }
  return cmp;
}

}  // namespace ginibre
