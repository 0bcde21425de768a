#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace desired::sim {

/// 64-bit FNV-1a over the bytes of \p text.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// One round of the splitmix64 finalizer; used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for the stream named \p label under \p master_seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) noexcept;

// Named random stream. The generator is std::mt19937_64, whose output sequence
// is fixed by the standard; all conversions to floating point and bounded
// integers are done here so results do not depend on the standard library's
// distribution implementations.
class RngStream {
 public:
  RngStream(std::string label, std::uint64_t seed);

  const std::string& label() const noexcept { return label_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_int(std::uint64_t bound);

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::string label_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace desired::sim
