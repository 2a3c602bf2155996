#ifndef HSIGMA_ERRORS_HPP
#define HSIGMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hsigma {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different Grassmann algebras.
class AlgebraMismatch : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (nonpositive body for log, positive alpha, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An element does not have the parity an operation requires.
class ParityError : public Error {
 public:
  using Error::Error;
};

/// A matrix (or its body) is not invertible.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant was violated by an input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed.
class PositiveDefinitenessError : public Error {
 public:
  using Error::Error;
};

/// The beta -> u inversion did not reach the residual tolerance.
class InversionFailure : public Error {
 public:
  InversionFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A Monte-Carlo observable produced NaN/Inf or the estimator could not be formed.
class EstimationFailure : public Error {
 public:
  using Error::Error;
};

/// Graph or tower fixture could not be loaded or is malformed.
class FixtureError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsigma

#endif  // HSIGMA_ERRORS_HPP
