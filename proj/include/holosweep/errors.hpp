#pragma once

#include <stdexcept>
#include <string>

namespace holosweep {

/// Invalid parameters or option combinations. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data, including I/O failures. Exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values produced by a numeric stage. Exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace holosweep
