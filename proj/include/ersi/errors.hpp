#pragma once

#include <stdexcept>
#include <string>

namespace ersi {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: config values, argument ranges, mismatched shapes.
// The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

// File and format problems. Exit code 3.
struct IoError : Error {
  using Error::Error;
};

// Numerical failures: singular systems, evaluation at a Green-function
// singularity, conditioning beyond the configured ceiling. Exit code 4.
struct NumericalError : Error {
  using Error::Error;
};

struct SingularPointError : NumericalError {
  using NumericalError::NumericalError;
};

// Probe construction requested outside the admissible band |xi| < 2*kappa_s.
struct OutOfBandError : ValidationError {
  using ValidationError::ValidationError;
};

// Source support not strictly inside the observation sphere.
struct GeometryError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace ersi
