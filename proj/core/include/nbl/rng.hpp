#pragma once

#include <cstdint>
#include <limits>

namespace nbl {

/// Counter-based random bit generator. Each (seed, stream, step) triple
/// names an independent sequence, so draws for agent i at step t never
/// depend on the order in which other agents or steps are evaluated.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) noexcept
      : key_(mix(mix(mix(seed) ^ (stream + 0x632be59bd9b4e019ULL)) ^
                 (step + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nbl
