#include "ginibre/kernel_ginibre.hpp"

#include <cmath>
#include <vector>

#include "ginibre/specfun.hpp"

namespace ginibre {

namespace {

// N! is multiplied in for small N and carried as a log otherwise.
KernelValue with_factorial(cplx sum, int N) {
  if (N > kPrefactorExtractionThreshold) return {sum, log_factorial(N)};
  return {sum * std::exp(log_factorial(N)), 0.0};
}

}  // namespace

KernelValue f_elliptic(cplx lambda, cplx gamma, const EllipticParams& params, KernelOptions opts) {
  const int N = params.N();
  const double tau = params.tau();
  if (tau == 0.0 && !opts.force_general_path) {
    return with_factorial(incomplete_exp(N, lambda * gamma), N);
  }

  // With c_k = C_k / sqrt(k!) each term is tau^{l-k} c_k(lambda) c_k(gamma).
  const auto cl = normalized_hermite_seq(lambda, tau, N);
  const auto cg = normalized_hermite_seq(gamma, tau, N);
  std::vector<double> tau_pow(static_cast<std::size_t>(N) + 1);
  tau_pow[0] = 1.0;
  for (int j = 1; j <= N; ++j) tau_pow[j] = tau_pow[j - 1] * tau;

  detail::CompensatedSum outer(opts.compensated);
  for (int l = 0; l <= N; ++l) {
    detail::CompensatedSum inner(opts.compensated);
    for (int k = 0; k <= l; ++k) inner.add(tau_pow[l - k] * (cl[k] * cg[k]));
    outer.add(inner.value());
  }
  return with_factorial(outer.value(), N);
}

KernelValue k_elliptic(cplx lambda, cplx gamma, const EllipticParams& params, KernelOptions opts) {
  const int N = params.N();
  if (lambda == gamma) {
    return {0.0, N > kPrefactorExtractionThreshold ? log_factorial(N) : 0.0};
  }
  // C_{l+1} C_l / l! = sqrt(l+1) c_{l+1} c_l in the normalized sequence.
  const auto cl = normalized_hermite_seq(lambda, params.tau(), N + 1);
  const auto cg = normalized_hermite_seq(gamma, params.tau(), N + 1);
  detail::CompensatedSum sum(opts.compensated);
  for (int l = 0; l <= N; ++l) {
    const double w = std::sqrt(static_cast<double>(l + 1));
    sum.add(w * (cl[l + 1] * cg[l] - cg[l + 1] * cl[l]));
  }
  return with_factorial(sum.value(), N);
}

}  // namespace ginibre
