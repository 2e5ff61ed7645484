#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace cbcc {

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a, used to key substreams by component name.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : text) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seedable xoshiro256** stream. The output sequence depends only on the
// seed, so it is bit-exact across platforms. Substreams are keyed by the
// seed (not the current position), so deriving one never perturbs the
// parent and derivation order does not matter.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on (0, 1); never returns 0, safe to pass to log().
  double uniform_open() noexcept;
  // Uniform integer on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // For a fixed parent seed, derive() is injective in `index` for each
  // component name.
  RngStream derive(std::uint64_t index) const noexcept;
  RngStream derive(std::string_view component, std::uint64_t index = 0) const noexcept;

  static std::uint64_t derive_seed(std::uint64_t parent_seed, std::uint64_t key,
                                   std::uint64_t index) noexcept;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace cbcc
