#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace ginibre::testing {

using cplx = std::complex<double>;

inline double rel_err(cplx got, cplx want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

inline cplx random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) <= 1.0) return radius * z;
  }
}

}  // namespace ginibre::testing
