#pragma once

#include <stdexcept>
#include <string>

namespace delayfield {

/// Raised when a simulated state exceeds the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by config ingestion: parse or validation failure, carries the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace delayfield
