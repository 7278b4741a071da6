#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Base class of every error raised by the library. `exit_code()` is the
/// process status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

/// Invalid physical parameters, dimensions or indices.
class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Configuration validation failure; the message carries the field path.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Eigensolver, integrator or quadrature failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when the Hamiltonian flow hits the edge of the atomic disk.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Density matrix whose trace is not one.
class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Basis truncation too small for the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Requested states are outside the converged set.
class ConvergenceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Empty microcanonical window or a ratio with a vanishing denominator.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for a distribution estimate.
class SampleSizeError : public Error {
 public:
  using Error::Error;
};

/// Export recipe applied to an archive that lacks its dataset.
class RecipeError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

}  // namespace dicke
