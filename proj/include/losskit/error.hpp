#pragma once

#include <stdexcept>
#include <string>

namespace losskit {

// Raised for malformed experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a computation cannot proceed numerically (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A forced measurement outcome whose Born probability is (numerically) zero.
class ZeroProbabilityOutcome : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace losskit
