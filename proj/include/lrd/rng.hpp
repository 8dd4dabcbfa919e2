#pragma once

#include <cstdint>

// Counter-based random numbers. Output i is a pure function of (key, i):
// the generator never carries hidden state beyond the counter, so streams
// can be split, replayed and consumed from worker threads with identical
// results on every platform.

namespace lrd {

/// SplitMix64 finalizer; a 64-bit bijective mixer.
std::uint64_t mix64(std::uint64_t z);

/// Inverse standard normal CDF (Wichura's AS 241 rational approximations),
/// accurate to ~1e-15 over p in (0, 1).
double inv_normal_cdf(double p);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Stream derivation: stream i of a seed uses key = seed XOR mix64-hash(i).
  static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

  /// Raw word at counter position i: mix64(key + (i+1)*golden).
  std::uint64_t word_at(std::uint64_t i) const;

  /// Uniform draw in (0, 1) at counter position i (53-bit mantissa, offset
  /// by 2^-54 so 0 is never produced).
  double uniform_at(std::uint64_t i) const;

  /// Standard normal draw at counter position i via the inverse CDF.
  double normal_at(std::uint64_t i) const;

  std::uint64_t next_u64() { return word_at(ctr_++); }
  double next_uniform() { return uniform_at(ctr_++); }
  double next_normal() { return normal_at(ctr_++); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace lrd
