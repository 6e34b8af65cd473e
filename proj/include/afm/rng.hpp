#pragma once

#include <cstdint>
#include <string_view>

namespace afm {

// 64-bit avalanche finalizer (splitmix64 mixing function).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based random stream.
//
// Output k of a stream with key K is mix64(K + k * GOLDEN); the key fully
// determines the sequence.  Sub-streams derive a fresh key from the parent
// key and a label (or index), so the stream tree is a pure function of the
// master seed: drawing from one branch never disturbs another, and a branch
// can be re-derived in any order.  Normal variates use the inverse-CDF of a
// uniform on the open unit interval, which keeps every draw a deterministic
// function of (key, counter).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix64(seed ^ kRootTag)) {}

  RandomStream branch(std::string_view label) const {
    return RandomStream(FromKey{}, mix64(key_ ^ fnv1a64(label)));
  }

  RandomStream branch(std::uint64_t index) const {
    return RandomStream(FromKey{}, mix64(mix64(key_ ^ kIndexTag) + index));
  }

  std::uint64_t next_u64() { return mix64(key_ + (counter_++) * kGolden); }

  // Uniform on [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); safe to feed through a quantile
  // function without producing infinities.
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal();

 private:
  struct FromKey {};
  RandomStream(FromKey, std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kRootTag = 0x243F6A8885A308D3ULL;
  static constexpr std::uint64_t kIndexTag = 0x13198A2E03707344ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace afm
