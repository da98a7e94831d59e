#pragma once

// Averaged characteristic polynomials F_N(lambda, gamma; tau) =
// <det(lambda - J) det(gamma - J^T)> of the partially symmetric real Ginibre
// ensemble and the antisymmetric kernel K_N = (lambda - gamma) F_N.

#include <complex>

#include "ginibre/kernel_value.hpp"
#include "ginibre/params.hpp"

namespace ginibre {

/// F_N = N! sum_{l=0}^{N} sum_{k=0}^{l} tau^{l-k} C_k(lambda) C_k(gamma) / k!.
/// At tau = 0 this is N! e_N(lambda gamma) and is evaluated as such.
KernelValue f_elliptic(std::complex<double> lambda, std::complex<double> gamma,
                       const EllipticParams& params, KernelOptions opts = {});

/// K_N = N! sum_{l=0}^{N} [C_{l+1}(lambda) C_l(gamma) - C_{l+1}(gamma) C_l(lambda)] / l!.
/// Returns exactly zero for lambda == gamma.
KernelValue k_elliptic(std::complex<double> lambda, std::complex<double> gamma,
                       const EllipticParams& params, KernelOptions opts = {});

}  // namespace ginibre
