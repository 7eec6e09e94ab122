#pragma once

#include <stdexcept>
#include <string>

namespace conekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or violated precondition (maps to CLI exit status 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A singular system whose right-hand side is not in the range of the operator.
class IncompatibleRhsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure during a computation (maps to CLI exit status 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace conekit
