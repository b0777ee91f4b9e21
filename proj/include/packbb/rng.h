// Copyright 2026 The packbb Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACKBB_RNG_H_
#define PACKBB_RNG_H_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace packbb {

// One step of the SplitMix64 sequence. Advances `state` and returns the mixed
// output.
constexpr std::uint64_t SplitMix64Next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless 64-bit mixer (the SplitMix64 finalizer applied to x).
constexpr std::uint64_t Mix64(std::uint64_t x) {
  std::uint64_t state = x;
  return SplitMix64Next(state);
}

// xoshiro256** with an explicit substream index.
//
// Stream split rule: the four state words are the first four SplitMix64
// outputs starting from `seed ^ (stream * 0xD1342543DE82EF95)`. Instances use
// stream 0 for A (row-major order) and stream 1 for c.
//
// The output sequence depends only on (seed, stream), never on the platform's
// standard library.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t sm = seed ^ (stream * 0xD1342543DE82EF95ULL);
    for (auto& word : s_) word = SplitMix64Next(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = Rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = Rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) from the top 53 bits of one 64-bit output.
  double Uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound) { return (*this)() % bound; }

  // Standard normal via Box-Muller. Always consumes exactly two outputs, so a
  // sequence of k normals is a prefix of a sequence of k+1 normals.
  double Normal() {
    const double u1 = 1.0 - Uniform01();  // (0, 1]
    const double u2 = Uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t Rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace packbb

#endif  // PACKBB_RNG_H_
