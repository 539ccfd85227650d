#pragma once

#include <stdexcept>
#include <string>

namespace ritzlab {

// Every failure the library can raise derives from Error, so callers that do
// not care about the distinctions can catch one type.  The CLI maps specific
// subtypes to exit codes and user-facing messages, and several subtypes carry
// the datum a caller needs to act (pivot index, offending vector index, ...).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix required to be positive definite has a pivot at or below the
// relative threshold.  pivot_index is the row where factorization stopped.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(int index, double value)
      : Error("matrix is not positive definite: pivot " + std::to_string(index) +
              " = " + std::to_string(value)),
        pivot_index(index),
        pivot_value(value) {}
  int pivot_index;
  double pivot_value;
};

// The iterative diagonalization failed to reach tolerance within its cap.
class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(int sweeps)
      : Error("eigensolver did not converge within " + std::to_string(sweeps) +
              " sweeps"),
        iterations(sweeps) {}
  int iterations;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class RankOutOfRange : public Error {
 public:
  using Error::Error;
};

// A trial Gram matrix failed its Cholesky factorization; vector_index names
// the trial vector at which dependence was detected.
class GramDegenerate : public Error {
 public:
  explicit GramDegenerate(int index)
      : Error("trial basis is numerically dependent at vector " +
              std::to_string(index)),
        vector_index(index) {}
  int vector_index;
};

class EmptyBasis : public Error {
 public:
  EmptyBasis() : Error("trial basis is empty") {}
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

// A vector passed as an exact eigenvector fails the residual test.
class NotEigenvector : public Error {
 public:
  NotEigenvector(int index, double residual_norm)
      : Error("supplied vector " + std::to_string(index) +
              " is not an eigenvector (residual " +
              std::to_string(residual_norm) + ")"),
        vector_index(index),
        residual(residual_norm) {}
  int vector_index;
  double residual;
};

// Malformed configuration; the message names the offending field.
class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace ritzlab
