#ifndef PACSIM_RNG_HPP
#define PACSIM_RNG_HPP

#include <cstdint>

namespace pacsim {

/// Counter-based generator: output i of stream s under seed k is a pure
/// function of (k, s, i), so parallel workers can each take their own
/// stream index and replay deterministically.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))), counter_(0) {}

  std::uint64_t next_u64() {
    return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound >= 1. Rejection-sampled.
  std::uint32_t next_below(std::uint32_t bound) {
    const std::uint64_t span = 0x100000000ULL - (0x100000000ULL % bound);
    for (;;) {
      const std::uint64_t r = next_u64() >> 32;
      if (r < span) return static_cast<std::uint32_t>(r % bound);
    }
  }

  std::uint64_t seed_key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace pacsim

#endif  // PACSIM_RNG_HPP
