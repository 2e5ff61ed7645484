#include "cbcc/rng.hpp"

namespace cbcc {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

RngStream::RngStream(std::uint64_t seed) noexcept : seed_(seed) {
  // Expand the seed with SplitMix64; the resulting state is never all-zero.
  std::uint64_t x = seed;
  for (auto& word : state_) {
    x += kGolden;
    word = mix64(x);
  }
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
  // Lemire's nearly-divisionless rejection method.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t RngStream::derive_seed(std::uint64_t parent_seed, std::uint64_t key,
                                     std::uint64_t index) noexcept {
  // mix64 is a bijection and addition of a constant is a bijection, so the
  // composition is injective in `index` for fixed (parent_seed, key).
  const std::uint64_t base = mix64(parent_seed ^ mix64(key + kGolden));
  return mix64(base + mix64(index));
}

RngStream RngStream::derive(std::uint64_t index) const noexcept {
  return RngStream(derive_seed(seed_, 0, index));
}

RngStream RngStream::derive(std::string_view component, std::uint64_t index) const noexcept {
  return RngStream(derive_seed(seed_, fnv1a64(component), index));
}

}  // namespace cbcc
