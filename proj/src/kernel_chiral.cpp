#include "ginibre/kernel_chiral.hpp"

#include <cmath>
#include <vector>

#include "ginibre/errors.hpp"
#include "ginibre/specfun.hpp"

namespace ginibre {

namespace {

// Holds the prefactor N!(N+nu)! dp2^{2N} either in the value (small N) or in
// the log (large N), together with the per-l weights that go with it:
// dp2^{2(N-l)} in the first case and dp2^{-2l} in the second.
struct ChiralScaling {
  double log_prefactor = 0.0;
  double multiplier = 1.0;
  std::vector<double> weights;
};

ChiralScaling chiral_scaling(int N, int nu, double dp2, int lmax) {
  ChiralScaling s;
  const double log_fact = log_factorial(N) + log_factorial(N + nu);
  s.weights.resize(static_cast<std::size_t>(lmax) + 1);
  if (N > kPrefactorExtractionThreshold) {
    s.log_prefactor = log_fact + 2.0 * N * std::log(dp2);
    const double q = 1.0 / (dp2 * dp2);
    s.weights[0] = 1.0;
    for (int l = 1; l <= lmax; ++l) s.weights[l] = s.weights[l - 1] * q;
  } else {
    s.multiplier = std::exp(log_fact);
    const double p = dp2 * dp2;
    for (int l = 0; l <= lmax; ++l) s.weights[l] = std::pow(p, N - l);
  }
  return s;
}

void require_valid(int N, int nu, double n) {
  if (N < 1 || nu < 0 || !(n > 0.0)) throw ValidationError("invalid chiral parameters");
}

}  // namespace

KernelValue f_chiral_max_asymmetry(cplx lambda, cplx gamma, int N, int nu, double n) {
  require_valid(N, nu, n);
  const cplx lg = lambda * gamma;
  const auto s = chiral_scaling(N, nu, 2.0 / n, 0);
  const cplx sum = ipow(lg, nu) * incomplete_bessel_sum(N, nu, 0.5 * n * lg);
  return {s.multiplier * s.weights[0] * sum, s.log_prefactor};
}

KernelValue k_chiral_max_asymmetry(cplx lambda, cplx gamma, int N, int nu, double n) {
  KernelValue f = f_chiral_max_asymmetry(lambda, gamma, N, nu, n);
  f.value *= lambda * lambda - gamma * gamma;
  f.rescaled_limit = true;
  return f;
}

KernelValue f_chiral(cplx lambda, cplx gamma, const ChiralParams& params, KernelOptions opts) {
  const int N = params.N();
  const int nu = params.nu();
  if (params.mu() == 1.0 && !opts.force_general_path) {
    return f_chiral_max_asymmetry(lambda, gamma, N, nu, params.n());
  }
  const double dm2 = params.delta_minus2();
  const auto sl = normalized_laguerre_seq(lambda, dm2, nu, N);
  const auto sg = normalized_laguerre_seq(gamma, dm2, nu, N);
  std::vector<double> dm4_pow(static_cast<std::size_t>(N) + 1);
  dm4_pow[0] = 1.0;
  for (int j = 1; j <= N; ++j) dm4_pow[j] = dm4_pow[j - 1] * dm2 * dm2;
  const auto scaling = chiral_scaling(N, nu, params.delta_plus2(), N);

  detail::CompensatedSum outer(opts.compensated);
  for (int l = 0; l <= N; ++l) {
    detail::CompensatedSum inner(opts.compensated);
    for (int k = 0; k <= l; ++k) inner.add(dm4_pow[l - k] * (sl[k] * sg[k]));
    outer.add(scaling.weights[l] * inner.value());
  }
  const cplx value = scaling.multiplier * ipow(lambda * gamma, nu) * outer.value();
  return {value, scaling.log_prefactor};
}

KernelValue k_chiral(cplx lambda, cplx gamma, const ChiralParams& params, KernelOptions opts) {
  const int N = params.N();
  const int nu = params.nu();
  if (params.mu() == 1.0 && !opts.force_general_path) {
    if (lambda == gamma) {
      KernelValue zero = k_chiral_max_asymmetry(0.0, 0.0, N, nu, params.n());
      zero.value = 0.0;
      return zero;
    }
    return k_chiral_max_asymmetry(lambda, gamma, N, nu, params.n());
  }
  const auto scaling = chiral_scaling(N, nu, params.delta_plus2(), N);
  if (lambda == gamma) return {0.0, scaling.log_prefactor};

  const double dm2 = params.delta_minus2();
  const auto sl = normalized_laguerre_seq(lambda, dm2, nu, N + 1);
  const auto sg = normalized_laguerre_seq(gamma, dm2, nu, N + 1);
  detail::CompensatedSum sum(opts.compensated);
  for (int l = 0; l <= N; ++l) {
    const double w = std::sqrt(static_cast<double>(l + 1) * static_cast<double>(l + 1 + nu));
    sum.add((scaling.weights[l] * w) * (sl[l + 1] * sg[l] - sg[l + 1] * sl[l]));
  }
  const cplx value = scaling.multiplier * ipow(lambda * gamma, nu) * sum.value();
  return {value, scaling.log_prefactor};
}

}  // namespace ginibre
