#pragma once

#include <cstdint>
#include <limits>

namespace mbg::sampling {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output function (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t v) {
  return mix64(key + kGolden + v);
}

}  // namespace detail

// Counter-based generator: the stream is a SplitMix64 sequence whose key is
// hashed from (seed, trial, player). Each (key) pair owns a disjoint stream,
// so parallel trials never share state. Satisfies UniformRandomBitGenerator
// and can drive the <random> distributions.
class RngStream {
public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t trial = 0,
                     std::uint64_t player = 0) {
    key_ = detail::mix64(seed);
    key_ = detail::combine(key_, trial);
    key_ = detail::combine(key_, player);
    state_ = key_;
  }

  // Derived stream keyed additionally by (tag_a, tag_b); independent of how
  // many draws the parent has consumed.
  RngStream substream(std::uint64_t tag_a, std::uint64_t tag_b = 0) const {
    RngStream s = *this;
    s.key_ = detail::combine(s.key_, tag_a);
    s.key_ = detail::combine(s.key_, tag_b);
    s.state_ = s.key_;
    return s;
  }

  result_type operator()() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

private:
  std::uint64_t key_ = 0;
  std::uint64_t state_ = 0;
};

}  // namespace mbg::sampling
