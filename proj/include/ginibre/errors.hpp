#pragma once

#include <stdexcept>
#include <string>

namespace ginibre {

/// Invalid parameters or configuration. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Any numerical breakdown (non-finite entries, failed iterations). Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine (eigensolver, quadrature refinement) did not converge.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A spectrum could not be split into real eigenvalues and conjugate pairs.
class ClassificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ginibre
