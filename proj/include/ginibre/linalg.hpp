#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ginibre {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// det(z I - M), or det(z I - M^T) when `transpose` is set, by LU with
/// partial pivoting. Throws NumericalError on a non-finite entry or pivot.
std::complex<double> shifted_determinant(const RealMatrix& M, std::complex<double> z,
                                         bool transpose = false);

/// Determinant of a general complex square matrix (same factorization).
std::complex<double> complex_determinant(ComplexMatrix A);

/// All eigenvalues of a real square matrix via a Hessenberg/real-Schur
/// decomposition. Throws ConvergenceError if the QR iteration fails.
std::vector<std::complex<double>> eigvals(const RealMatrix& M);

/// Largest singular value.
double spectral_norm(const RealMatrix& M);

/// Smallest singular value of a complex matrix.
double smallest_singular_value(const ComplexMatrix& A);

}  // namespace ginibre
