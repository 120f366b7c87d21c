#pragma once

#include <stdexcept>
#include <string>

namespace resav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A stated scheme invariant did not hold (strict mode), or an internal
/// consistency check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Floating-point or algebraic failure while advancing a solution.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularSolve : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The explicit SAV update 1 + dt (K - forcing) became non-positive.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateDissipation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconsistentCoefficients : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace resav
