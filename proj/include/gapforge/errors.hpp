#pragma once

#include <stdexcept>
#include <string>

namespace gapforge {

// Invalid user input or configuration. Maps to CLI exit code 1.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not reach its stated accuracy. Maps to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gram matrix too ill-conditioned for the requested basis.
struct BasisDegeneracyError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace gapforge
