// Copyright 2026 The fpsketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based randomness. Every random decision in the library is a pure
// function of a 64-bit seed and some integer coordinates, so sketches and
// experiments replay bit-for-bit on any platform.

#ifndef FPSKETCH_RANDOM_H_
#define FPSKETCH_RANDOM_H_

#include <cstdint>
#include <limits>

namespace fpsketch {

// SplitMix64 finalizer (Stafford variant 13).
constexpr uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t HashCombine(uint64_t seed, uint64_t value) {
  return Mix64(seed ^ Mix64(value + 0x9e3779b97f4a7c15ULL));
}

constexpr uint64_t HashCombine(uint64_t seed, uint64_t a, uint64_t b) {
  return HashCombine(HashCombine(seed, a), b);
}

// Domain-separation tags so that projection entries, subsampling coins and
// experiment seeds never share a hash input.
inline constexpr uint64_t kProjectionDomain = 0x70726f6a65637431ULL;
inline constexpr uint64_t kCoinDomain = 0x636f696e73616d70ULL;
inline constexpr uint64_t kTrialDomain = 0x747269616c736565ULL;

// SplitMix64 generator. Satisfies std::uniform_random_bit_generator.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix64(state_);
  }

 private:
  uint64_t state_;
};

// Maps 64 random bits to a double strictly inside (0, 1).
constexpr double UniformOpen(uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
template <class Gen>
uint64_t UniformBelow(Gen& gen, uint64_t bound) {
  unsigned __int128 product =
      static_cast<unsigned __int128>(gen()) * static_cast<unsigned __int128>(bound);
  auto low = static_cast<uint64_t>(product);
  if (low < bound) {
    const uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(gen()) *
                static_cast<unsigned __int128>(bound);
      low = static_cast<uint64_t>(product);
    }
  }
  return static_cast<uint64_t>(product >> 64);
}

}  // namespace fpsketch

#endif  // FPSKETCH_RANDOM_H_
