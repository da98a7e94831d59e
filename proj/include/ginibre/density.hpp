#pragma once

// Complex-eigenvalue densities assembled from kernel x weight, and the
// Monte-Carlo histograms they are validated against.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ginibre/params.hpp"

namespace ginibre {

struct WeightFunction {
  std::string id;
  std::function<double(std::complex<double>)> eval;
};

/// erfc(sqrt(2)|Im z|) exp((Im z)^2 - (Re z)^2), the tau = 0 complex-pair weight.
/// Evaluated with a scaled complementary error function so that it stays
/// finite for large |Im z|.
double ginibre_pair_weight(std::complex<double> z);

/// Named weight functions. Registration rejects weights that are not
/// symmetric under conjugation (checked at 100 pseudo-random points).
class WeightRegistry {
 public:
  /// Registry with "ginibre" (the tau = 0 weight above) and "identity".
  static WeightRegistry with_defaults();

  void add(WeightFunction weight);
  /// Throws ValidationError for an unknown id.
  const WeightFunction& get(const std::string& id) const;
  bool contains(const std::string& id) const { return weights_.count(id) != 0; }
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, WeightFunction> weights_;
};

enum class Normalization { Raw, UnitMass };

/// Cells of a uniform rectangular grid; axes hold cell centres.
struct GridSpec {
  double re_min = -4.0, re_max = 4.0;
  int re_bins = 16;
  double im_min = -4.0, im_max = 4.0;
  int im_bins = 16;

  double re_width() const { return (re_max - re_min) / re_bins; }
  double im_width() const { return (im_max - im_min) / im_bins; }
  double cell_area() const { return re_width() * im_width(); }
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct DensityGrid {
  GridSpec spec;
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  /// Row-major over (im, re): values[i * re_bins + r].
  std::vector<double> values;
  Normalization normalization = Normalization::Raw;
  /// Human-readable description of what the values mean.
  std::string label;
  /// Histograms only: raw counts per cell and how many complex eigenvalues
  /// were seen in total (inside or outside the grid).
  std::vector<std::int64_t> counts;
  std::int64_t total_complex = 0;

  double& at(int im_index, int re_index) { return values[im_index * spec.re_bins + re_index]; }
  double at(int im_index, int re_index) const { return values[im_index * spec.re_bins + re_index]; }
};

struct DensityOptions {
  Normalization normalization = Normalization::Raw;
  /// 1 evaluates at cell centres; k > 1 averages over a k x k Gauss-Legendre
  /// rule inside each cell (what a histogram measures).
  int cell_order = 1;
};

/// Raw value 2 |Im z| w(z) Re F_N(z, conj z; tau) / N!. Exactly zero on the real axis.
double elliptic_density_point(std::complex<double> z, const EllipticParams& params,
                              const WeightFunction& weight);

/// Raw value 2 |Im z| w(z) |Re F^ch(z, conj z)| / (N! (N+nu)!).
double chiral_density_point(std::complex<double> z, const ChiralParams& params,
                            const WeightFunction& weight);

DensityGrid complex_density_elliptic(const GridSpec& grid, const EllipticParams& params,
                                     const WeightFunction& weight, DensityOptions opts = {});

DensityGrid complex_density_chiral(const GridSpec& grid, const ChiralParams& params,
                                   const WeightFunction& weight, DensityOptions opts = {});

/// Histogram of the complex-classified eigenvalues (both members of each
/// pair), normalized to unit mass over the grid.
DensityGrid mc_density_histogram(const EnsembleParams& params, std::int64_t samples,
                                 const GridSpec& grid, std::uint64_t seed, int shards = 1);

struct DensityComparison {
  /// Least-squares constant c minimizing sum (mc - c * closed)^2 over used cells.
  double constant = 0.0;
  /// max |c * closed - mc| / mc over used cells.
  double max_relative_deviation = 0.0;
  int cells_used = 0;
};

/// Compares a closed-form grid to a histogram on the cells with at least
/// `min_count` counts.
DensityComparison compare_density(const DensityGrid& closed, const DensityGrid& histogram,
                                  std::int64_t min_count = 500);

}  // namespace ginibre
