#pragma once

#include <stdexcept>
#include <string>

namespace smol {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or configuration (invariant violation, malformed input).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or parse failure of an external artifact.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure, e.g. a rank-deficient least-squares system.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace smol
