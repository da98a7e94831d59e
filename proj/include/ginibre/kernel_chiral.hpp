#pragma once

// Averaged characteristic polynomials and antisymmetric kernel of the chiral
// real Ginibre two-matrix ensemble:
//   F^ch = <det(lambda - M) det(gamma - M^T)>,  K^ch = (lambda^2 - gamma^2) F^ch.

#include <complex>

#include "ginibre/kernel_value.hpp"
#include "ginibre/params.hpp"

namespace ginibre {

/// F^ch = N!(N+nu)! d+^{4N} (lambda gamma)^nu
///        sum_l sum_{k<=l} d-^{4(l-k)} d+^{-4l} S_k(lambda) S_k(gamma) / (k!(k+nu)!)
/// with d+-^2 = (1 +- mu^2)/n. At mu = 1 the incomplete I-Bessel form is used.
KernelValue f_chiral(std::complex<double> lambda, std::complex<double> gamma,
                     const ChiralParams& params, KernelOptions opts = {});

/// K^ch = N!(N+nu)! d+^{4N} (lambda gamma)^nu
///        sum_l d+^{-4l} [S_{l+1}(lambda) S_l(gamma) - S_{l+1}(gamma) S_l(lambda)] / (l!(l+nu)!).
///
/// At mu = 1 returns the maximal-asymmetry limit form (see k_chiral_max_asymmetry)
/// with rescaled_limit set. The general expression is regular there and
/// converges to the same value.
KernelValue k_chiral(std::complex<double> lambda, std::complex<double> gamma,
                     const ChiralParams& params, KernelOptions opts = {});

/// N!(N+nu)! (2/n)^{2N} (lambda gamma)^nu sum_{k=0}^{N} (n lambda gamma / 2)^{2k} / (k!(k+nu)!)
KernelValue f_chiral_max_asymmetry(std::complex<double> lambda, std::complex<double> gamma, int N,
                                   int nu, double n);

/// (lambda^2 - gamma^2) times f_chiral_max_asymmetry.
KernelValue k_chiral_max_asymmetry(std::complex<double> lambda, std::complex<double> gamma, int N,
                                   int nu, double n);

}  // namespace ginibre
