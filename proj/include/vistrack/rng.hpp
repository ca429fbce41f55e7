#pragma once

#include <cstdint>

namespace vistrack {

/// splitmix64 step; advances the state and returns the next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic per-item random stream derived from (seed, stream index),
/// so items can be processed in parallel without changing the draws.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) {
    state_ = seed;
    std::uint64_t mixed = splitmix64(state_);
    state_ = mixed ^ (stream * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL);
    splitmix64(state_);  // decorrelate adjacent streams
  }

  std::uint64_t next() { return splitmix64(state_); }

  /// Unbiased draw from [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace vistrack
