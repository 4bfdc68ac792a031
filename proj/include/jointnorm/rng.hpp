#pragma once

#include <cstdint>
#include <limits>

namespace jointnorm {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output k of a stream is mix64(key + k * gamma).
/// Independent streams are derived from (seed, purpose, index), so values
/// do not depend on the order in which streams are consumed. Models
/// UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
      : key_(mix64(seed ^ mix64(mix64(purpose + kGamma) + index))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return mix64(key_ + kGamma * ++counter_); }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace jointnorm
