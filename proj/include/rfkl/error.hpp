#pragma once

#include <stdexcept>
#include <string>

namespace rfkl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A sample fell outside the ball the features were built for.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class EmptySampleSet : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class NonIntegrableSpectrum : public Error {
 public:
  using Error::Error;
};

/// Raised when a computation would need a quantity that is not representable
/// in double precision (for example a step size derived from a vacuous bound).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfkl
