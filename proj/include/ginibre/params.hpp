#pragma once

#include <variant>

namespace ginibre {

/// Partially symmetric real Ginibre ensemble J = S + vA of size N x N.
///
/// tau = 0 is the maximally asymmetric Ginibre ensemble, tau = 1 the GOE.
class EllipticParams {
 public:
  EllipticParams(int N, double tau);

  int N() const { return N_; }
  double tau() const { return tau_; }
  /// v = sqrt((1 - tau) / (1 + tau)), recomputed on every call.
  double v() const;

  friend bool operator==(const EllipticParams&, const EllipticParams&) = default;

 private:
  int N_;
  double tau_;
};

/// Chiral two-matrix ensemble: A, B are N x (N + nu), M = [[0, A + mu B], [A^T - mu B^T, 0]].
class ChiralParams {
 public:
  ChiralParams(int N, int nu, double mu, double n);

  /// Accepts nu as a real number and rejects anything that is not a
  /// non-negative integer.
  static ChiralParams from_real_nu(int N, double nu, double mu, double n);

  int N() const { return N_; }
  int nu() const { return nu_; }
  double mu() const { return mu_; }
  double n() const { return n_; }
  int dimension() const { return 2 * N_ + nu_; }

  /// (1 + mu^2) / n
  double delta_plus2() const;
  /// (1 - mu^2) / n, exactly zero at mu = 1.
  double delta_minus2() const;

  friend bool operator==(const ChiralParams&, const ChiralParams&) = default;

 private:
  int N_;
  int nu_;
  double mu_;
  double n_;
};

using EnsembleParams = std::variant<EllipticParams, ChiralParams>;

}  // namespace ginibre
