// SPDX-License-Identifier: Apache-2.0
//
// xoshiro256** (Blackman & Vigna, 2018) seeded through SplitMix64.
//
// Synthetic scenes must be reproducible across platforms and across
// implementations in other languages, so the generator and the mapping to
// doubles are fixed here rather than delegated to <random> distributions:
//
//   seed:    s[i] = splitmix64(state), state starting at `seed`, i = 0..3
//   next():  result = rotl(s[1] * 5, 7) * 9, then the standard state update
//   uniform: (next() >> 11) * 2^-53, in [0, 1)

#pragma once

#include <array>
#include <cstdint>

namespace rtbvh {

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace rtbvh
