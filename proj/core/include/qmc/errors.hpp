#pragma once

#include <stdexcept>

namespace qmc {

/// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file was readable but its contents violate the expected format.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

/// A solver or command configuration is invalid.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qmc
