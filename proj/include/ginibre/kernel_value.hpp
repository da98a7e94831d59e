#pragma once

#include <cmath>
#include <complex>

namespace ginibre {

/// A kernel or characteristic-polynomial average with an optional factored-out
/// positive prefactor: full value = value * exp(log_prefactor).
struct KernelValue {
  std::complex<double> value;
  double log_prefactor = 0.0;
  /// Set by k_chiral at mu = 1, where the maximal-asymmetry limit form is returned.
  bool rescaled_limit = false;

  std::complex<double> full() const { return value * std::exp(log_prefactor); }
};

struct KernelOptions {
  /// Neumaier-compensated accumulation of both the inner and outer sums.
  bool compensated = false;
  /// Skip the closed-form fast paths at tau = 0 and mu = 1.
  bool force_general_path = false;
};

/// Prefactors are multiplied in for N up to this value and carried in
/// log_prefactor above it.
inline constexpr int kPrefactorExtractionThreshold = 20;

namespace detail {

/// Complex Neumaier summation, componentwise.
class CompensatedSum {
 public:
  explicit CompensatedSum(bool enabled) : enabled_(enabled) {}

  void add(std::complex<double> x) {
    if (!enabled_) {
      sum_ += x;
      return;
    }
    re_ = step(re_, comp_re_, x.real());
    im_ = step(im_, comp_im_, x.imag());
  }

  std::complex<double> value() const {
    return enabled_ ? std::complex<double>(re_ + comp_re_, im_ + comp_im_) : sum_;
  }

 private:
  static double step(double sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    return t;
  }

  bool enabled_;
  std::complex<double> sum_{};
  double re_ = 0.0, im_ = 0.0, comp_re_ = 0.0, comp_im_ = 0.0;
};

}  // namespace detail
}  // namespace ginibre
