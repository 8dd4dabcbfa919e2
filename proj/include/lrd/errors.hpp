#pragma once

#include <stdexcept>
#include <string>

namespace lrd {

/// Invalid parameters, malformed configs, out-of-domain requests.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-positive-definite matrix, iteration cap hit,
/// failed circulant embedding without fallback permission.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File-system problems: missing inputs, refusing to overwrite outputs.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lrd
