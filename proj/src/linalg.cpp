#include "ginibre/linalg.hpp"

#include <cmath>
#include <string>

#include "ginibre/errors.hpp"

namespace ginibre {

namespace {

bool finite(std::complex<double> z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// In-place LU on a row-major n x n buffer; returns the determinant.
std::complex<double> lu_determinant(std::vector<std::complex<double>>& a, int n) {
  std::complex<double> det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::abs(a[r * n + col]);
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (!std::isfinite(best)) throw NumericalError("non-finite entry during LU factorization");
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      det = -det;
    }
    const std::complex<double> p = a[col * n + col];
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      const std::complex<double> f = a[r * n + col] / p;
      if (f == 0.0) continue;
      for (int c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  if (!finite(det)) throw NumericalError("determinant overflowed");
  return det;
}

}  // namespace

std::complex<double> shifted_determinant(const RealMatrix& M, std::complex<double> z,
                                         bool transpose) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw ValidationError("shifted_determinant needs a square matrix");
  if (!M.allFinite() || !finite(z)) throw NumericalError("non-finite entry in determinant input");
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double m = transpose ? M(c, r) : M(r, c);
      a[r * n + c] = (r == c) ? z - m : std::complex<double>(-m);
    }
  }
  return lu_determinant(a, n);
}

std::complex<double> complex_determinant(ComplexMatrix A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw ValidationError("complex_determinant needs a square matrix");
  if (!A.allFinite()) throw NumericalError("non-finite entry in determinant input");
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[r * n + c] = A(r, c);
  return lu_determinant(a, n);
}

std::vector<std::complex<double>> eigvals(const RealMatrix& M) {
  if (M.rows() != M.cols()) throw ValidationError("eigvals needs a square matrix");
  if (!M.allFinite()) throw NumericalError("eigvals: matrix has non-finite entries");
  if (M.rows() == 0) return {};
  Eigen::EigenSolver<RealMatrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigvals: QR iteration did not converge for a " +
                           std::to_string(M.rows()) + "x" + std::to_string(M.rows()) + " matrix");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_norm(const RealMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<RealMatrix> svd(M);
  return svd.singularValues()(0);
}

double smallest_singular_value(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(A);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

}  // namespace ginibre
