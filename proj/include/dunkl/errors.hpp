#pragma once

#include <stdexcept>
#include <string>

namespace dunkl {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (config = 1, regime = 2, numeric = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters outside the regime where jump rates are finite (beta*k <= 1).
class RegimeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedMultiplicity : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A point lies on a chamber wall where a root-dependent quantity is singular.
class WallError : public NumericError {
 public:
  using NumericError::NumericError;
};

class StepError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class StiffnessError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ExtrapolationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InsufficientRangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class QuadratureError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace dunkl
