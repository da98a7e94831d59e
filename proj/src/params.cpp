#include "ginibre/params.hpp"

#include <cmath>
#include <string>

#include "ginibre/errors.hpp"

namespace ginibre {

EllipticParams::EllipticParams(int N, double tau) : N_(N), tau_(tau) {
  if (N < 1) throw ValidationError("elliptic ensemble needs N >= 1, got " + std::to_string(N));
  if (!(tau >= 0.0 && tau <= 1.0))
    throw ValidationError("tau must lie in [0, 1], got " + std::to_string(tau));
}

double EllipticParams::v() const { return std::sqrt((1.0 - tau_) / (1.0 + tau_)); }

ChiralParams::ChiralParams(int N, int nu, double mu, double n) : N_(N), nu_(nu), mu_(mu), n_(n) {
  if (N < 1) throw ValidationError("chiral ensemble needs N >= 1, got " + std::to_string(N));
  if (nu < 0) throw ValidationError("nu must be >= 0, got " + std::to_string(nu));
  if (!(mu >= 0.0 && mu <= 1.0))
    throw ValidationError("mu must lie in [0, 1], got " + std::to_string(mu));
  if (!(n > 0.0) || !std::isfinite(n))
    throw ValidationError("variance parameter n must be positive, got " + std::to_string(n));
}

ChiralParams ChiralParams::from_real_nu(int N, double nu, double mu, double n) {
  if (!std::isfinite(nu) || nu < 0.0 || std::floor(nu) != nu || nu > 1e6)
    throw ValidationError("nu must be a non-negative integer, got " + std::to_string(nu));
  return ChiralParams(N, static_cast<int>(nu), mu, n);
}

double ChiralParams::delta_plus2() const { return (1.0 + mu_ * mu_) / n_; }

double ChiralParams::delta_minus2() const { return (1.0 - mu_ * mu_) / n_; }

}  // namespace ginibre
