#include "ginibre/specfun.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "ginibre/errors.hpp"

namespace ginibre {

namespace {

void require_kmax(int kmax) {
  if (kmax < 0) throw ValidationError("kmax must be >= 0, got " + std::to_string(kmax));
}

}  // namespace

ScaledPolySeq scaled_hermite_seq(cplx z, double tau, int kmax) {
  require_kmax(kmax);
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0");
  ScaledPolySeq seq{PolyKind::ScaledHermite, z, tau, 0, {}};
  seq.values.resize(static_cast<std::size_t>(kmax) + 1);
  seq.values[0] = 1.0;
  if (kmax >= 1) seq.values[1] = z;
  for (int k = 1; k < kmax; ++k) {
    seq.values[k + 1] = z * seq.values[k] - (static_cast<double>(k) * tau) * seq.values[k - 1];
  }
  return seq;
}

ScaledPolySeq scaled_laguerre_seq(cplx z, double delta2, int nu, int kmax) {
  require_kmax(kmax);
  if (!(delta2 >= 0.0)) throw ValidationError("delta2 must be >= 0");
  if (nu < 0) throw ValidationError("nu must be >= 0");
  ScaledPolySeq seq{PolyKind::ScaledLaguerre, z, delta2, nu, {}};
  seq.values.resize(static_cast<std::size_t>(kmax) + 1);
  const cplx x = z * z;
  const double d2 = delta2 * delta2;
  seq.values[0] = 1.0;
  if (kmax >= 1) seq.values[1] = x - static_cast<double>(1 + nu) * delta2;
  for (int k = 1; k < kmax; ++k) {
    const double a = static_cast<double>(2 * k + 1 + nu) * delta2;
    const double b = static_cast<double>(k) * static_cast<double>(k + nu) * d2;
    seq.values[k + 1] = (x - a) * seq.values[k] - b * seq.values[k - 1];
  }
  return seq;
}

std::vector<cplx> normalized_hermite_seq(cplx z, double tau, int kmax) {
  require_kmax(kmax);
  std::vector<cplx> c(static_cast<std::size_t>(kmax) + 1);
  c[0] = 1.0;
  if (kmax >= 1) c[1] = z;
  // c_{k+1} = (z c_k - sqrt(k) tau c_{k-1}) / sqrt(k+1)
  for (int k = 1; k < kmax; ++k) {
    c[k + 1] = (z * c[k] - (std::sqrt(static_cast<double>(k)) * tau) * c[k - 1]) /
               std::sqrt(static_cast<double>(k + 1));
  }
  return c;
}

std::vector<cplx> normalized_laguerre_seq(cplx z, double delta2, int nu, int kmax) {
  require_kmax(kmax);
  std::vector<cplx> s(static_cast<std::size_t>(kmax) + 1);
  const cplx x = z * z;
  const double d2 = delta2 * delta2;
  // s_0 = 1 / sqrt(nu!)
  s[0] = std::exp(-0.5 * log_factorial(nu));
  if (kmax >= 1) {
    s[1] = (x - static_cast<double>(1 + nu) * delta2) * s[0] /
           std::sqrt(static_cast<double>(1 + nu));
  }
  for (int k = 1; k < kmax; ++k) {
    const double kk = static_cast<double>(k);
    const double a = static_cast<double>(2 * k + 1 + nu) * delta2;
    const double b = std::sqrt(kk * (kk + nu)) * d2;
    s[k + 1] = ((x - a) * s[k] - b * s[k - 1]) / std::sqrt((kk + 1.0) * (kk + 1.0 + nu));
  }
  return s;
}

cplx ipow(cplx base, int e) {
  cplx result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

cplx incomplete_exp(int N, cplx x) {
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int n = 1; n <= N; ++n) {
    term *= x / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

cplx incomplete_bessel_sum(int N, int nu, cplx y) {
  if (nu < 0) throw ValidationError("nu must be >= 0");
  const cplx y2 = y * y;
  cplx term = std::exp(-log_factorial(nu));  // 1 / (0! nu!)
  cplx sum = term;
  for (int k = 1; k <= N; ++k) {
    term *= y2 / (static_cast<double>(k) * static_cast<double>(k + nu));
    sum += term;
  }
  return sum;
}

double log_factorial(int n) {
  if (n < 0) throw ValidationError("log_factorial of a negative integer");
  if (n < 2) return 0.0;
  if (n <= 30) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return std::log(f);
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

namespace {

GaussHermiteRule build_gauss_hermite(int n) {
  // Nodes: eigenvalues of the Jacobi matrix (Golub-Welsch), then polished by
  // Newton steps on the orthonormal recurrence, which also gives the weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int j = 1; j < n; ++j) sub(j - 1) = std::sqrt(0.5 * j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("Gauss-Hermite: Jacobi matrix eigensolver failed for order " +
                           std::to_string(n));

  const double pim4 = std::pow(std::numbers::pi, -0.25);
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = solver.eigenvalues()(i);
    double pp = 0.0;
    for (int step = 0; step < 3; ++step) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      if (step < 2) z -= p1 / pp;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  // symmetric by construction
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int order) {
  if (order < 1) throw ValidationError("Gauss-Hermite order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const GaussHermiteRule>(build_gauss_hermite(order));
  return *slot;
}

namespace {

struct QuadResult {
  cplx value;
  double magnitude;  // integral of |integrand|, the scale for the convergence test
};

QuadResult hermite_quadrature(cplx lambda, double tau, int k, int order) {
  const auto& rule = gauss_hermite_rule(order);
  const double s = std::sqrt(2.0 * tau);
  cplx sum = 0.0;
  double mag = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const cplx f = ipow(lambda + cplx(0.0, s * rule.nodes[j]), k);
    sum += rule.weights[j] * f;
    mag += rule.weights[j] * std::abs(f);
  }
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  return {sum * norm, mag * norm};
}

QuadResult laguerre_quadrature(cplx lambda, int k, int nu, int order) {
  const auto& rule = gauss_hermite_rule(order);
  cplx sum = 0.0;
  double mag = 0.0;
  const cplx i(0.0, 1.0);
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
    cplx row = 0.0;
    double row_mag = 0.0;
    for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
      const cplx u(rule.nodes[a], rule.nodes[b]);
      const cplx f = ipow(lambda + i * u, k) * ipow(lambda + i * std::conj(u), k + nu);
      row += rule.weights[b] * f;
      row_mag += rule.weights[b] * std::abs(f);
    }
    sum += rule.weights[a] * row;
    mag += rule.weights[a] * row_mag;
  }
  return {sum / std::numbers::pi, mag / std::numbers::pi};
}

template <class Quad>
cplx refine(Quad quad, const QuadratureOptions& opts, const char* name) {
  if (opts.nodes < 1) throw ValidationError(std::string(name) + ": node count must be >= 1");
  const QuadResult coarse = quad(opts.nodes);
  const QuadResult fine = quad(2 * opts.nodes);
  // Rounding noise scales with the integral of |integrand|, not with the result.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * fine.magnitude;
  if (std::abs(fine.value - coarse.value) > opts.tolerance * std::abs(fine.value) + noise) {
    throw ConvergenceError(std::string(name) + ": doubling the node count from " +
                           std::to_string(opts.nodes) + " changed the result beyond tolerance");
  }
  return fine.value;
}

}  // namespace

cplx hermite_integral_oracle(cplx lambda, double tau, int k, QuadratureOptions opts) {
  if (!(tau > 0.0)) throw ValidationError("hermite_integral_oracle needs tau > 0");
  if (k < 0) throw ValidationError("k must be >= 0");
  return refine([&](int order) { return hermite_quadrature(lambda, tau, k, order); }, opts,
                "hermite_integral_oracle");
}

cplx laguerre_integral_oracle(cplx lambda, int k, int nu, QuadratureOptions opts) {
  if (k < 0 || nu < 0) throw ValidationError("k and nu must be >= 0");
  return refine([&](int order) { return laguerre_quadrature(lambda, k, nu, order); }, opts,
                "laguerre_integral_oracle");
}

cplx laguerre_series_oracle(int k, int nu, cplx x) {
  if (k < 0 || nu < 0) throw ValidationError("k and nu must be >= 0");
  // Extended precision: the alternating series cancels heavily for large |x|.
  // c_0 = (k+nu)! / (k! nu!), c_{m+1} / c_m = -(k-m) / ((m+1+nu)(m+1))
  using xcplx = std::complex<long double>;
  long double c = 1.0L;
  for (int j = 1; j <= k; ++j) c *= static_cast<long double>(nu + j) / j;
  const xcplx xl(x.real(), x.imag());
  xcplx xm = 1.0L;
  xcplx sum = c;
  for (int m = 0; m < k; ++m) {
    c *= -static_cast<long double>(k - m) / (static_cast<long double>(m + 1 + nu) * (m + 1));
    xm *= xl;
    sum += c * xm;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

}  // namespace ginibre
