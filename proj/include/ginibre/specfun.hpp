#pragma once

// Scaled Hermite / Laguerre sequences and the series and quadrature oracles
// used to validate them.
//
// C_k(z; tau)    = (tau/2)^{k/2} H_k(z / sqrt(2 tau))
// S_k(z; delta2) = (-1)^k k! delta2^k L_k^nu(z^2 / delta2)
//
// Both are monic polynomials (in z and z^2 respectively) with regular limits
// at zero scale, C_k -> z^k and S_k -> z^{2k}.

#include <complex>
#include <cstddef>
#include <vector>

namespace ginibre {

using cplx = std::complex<double>;

enum class PolyKind { ScaledHermite, ScaledLaguerre };

struct ScaledPolySeq {
  PolyKind kind;
  cplx point;
  double scale;  // tau for Hermite, delta^2 for Laguerre
  int nu = 0;    // Laguerre only
  std::vector<cplx> values;  // index 0..kmax

  std::size_t kmax() const { return values.size() - 1; }
  cplx operator[](std::size_t k) const { return values[k]; }
};

/// C_0..C_kmax by C_{k+1} = z C_k - k tau C_{k-1}.
ScaledPolySeq scaled_hermite_seq(cplx z, double tau, int kmax);

/// S_0..S_kmax by S_{k+1} = (z^2 - (2k+1+nu) d) S_k - k (k+nu) d^2 S_{k-1}.
ScaledPolySeq scaled_laguerre_seq(cplx z, double delta2, int nu, int kmax);

/// C_k / sqrt(k!), k = 0..kmax. Bounded for large k, used inside the kernel sums.
std::vector<cplx> normalized_hermite_seq(cplx z, double tau, int kmax);

/// S_k / sqrt(k! (k+nu)!), k = 0..kmax.
std::vector<cplx> normalized_laguerre_seq(cplx z, double delta2, int nu, int kmax);

/// base^e for e >= 0 by repeated squaring (exact 0^0 = 1).
cplx ipow(cplx base, int e);

/// sum_{n=0}^{N} x^n / n!
cplx incomplete_exp(int N, cplx x);

/// sum_{k=0}^{N} y^{2k} / (k! (k+nu)!)
cplx incomplete_bessel_sum(int N, int nu, cplx y);

/// Physicists' Gauss-Hermite rule for weight exp(-x^2). Nodes ascending.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are built by Newton iteration on the orthonormal recurrence and
/// memoized per order; the returned reference stays valid for the program's
/// lifetime.
const GaussHermiteRule& gauss_hermite_rule(int order);

struct QuadratureOptions {
  int nodes = 200;
  /// Relative change allowed between the rule and the doubled rule.
  double tolerance = 1e-10;
};

/// (1/sqrt(pi)) int dx exp(-x^2) (lambda + i sqrt(2 tau) x)^k.
/// Throws ConvergenceError if doubling the node count moves the result by
/// more than the tolerance.
cplx hermite_integral_oracle(cplx lambda, double tau, int k, QuadratureOptions opts = {});

/// (1/pi) int d^2u exp(-|u|^2) (lambda + i u)^k (lambda + i conj(u))^{k+nu},
/// evaluated with a tensor Gauss-Hermite rule over (Re u, Im u).
/// Equals k! (-1)^k lambda^nu L_k^nu(lambda^2).
cplx laguerre_integral_oracle(cplx lambda, int k, int nu, QuadratureOptions opts = {120, 1e-10});

/// L_k^nu(x) by its defining finite series.
cplx laguerre_series_oracle(int k, int nu, cplx x);

/// log(n!)
double log_factorial(int n);

}  // namespace ginibre
