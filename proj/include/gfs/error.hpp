#pragma once

#include <stdexcept>
#include <string>

namespace gfs {

// Input data that cannot be used: malformed files, out-of-range values,
// degenerate features. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Saved model or config documents that are truncated, malformed or carry
// an unsupported version.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid experiment configuration or CLI usage (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gfs
