#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrd/errors.hpp"

namespace lrd {

/// Autocovariance table gamma(0..maxlag), indexed symmetrically:
/// at(-n) == at(n). The dense linear algebra and the sweep drivers work on
/// these tables instead of calling back into model code.
class Autocov {
 public:
  Autocov() = default;
  explicit Autocov(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("Autocov: empty table");
  }

  double operator()(std::int64_t lag) const {
    const std::int64_t a = lag < 0 ? -lag : lag;
    if (a >= static_cast<std::int64_t>(values_.size())) {
      throw ConfigError("Autocov: lag " + std::to_string(lag) +
                        " beyond table length " + std::to_string(values_.size()));
    }
    return values_[static_cast<std::size_t>(a)];
  }

  std::int64_t max_lag() const { return static_cast<std::int64_t>(values_.size()) - 1; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace lrd
