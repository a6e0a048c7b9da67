// Copyright 2026 The SAA-inc Authors. All rights reserved.
//
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

#ifndef SAA_RANDOM_H_
#define SAA_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace saa {

// SplitMix64 finalizer, used to turn structured coordinates into seeds.
constexpr std::uint64_t MixBits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from a base seed and a path of
// coordinates such as (instance, composition, seat).
inline std::uint64_t DeriveSeed(std::uint64_t base,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = MixBits(base);
  for (std::uint64_t c : path) h = MixBits(h ^ MixBits(c + 0x632be59bd9b4e019ULL));
  return h;
}

// Thin wrapper over mt19937_64. Real and integer draws are written out
// explicitly instead of going through <random> distributions, whose output
// differs across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi]. A zero-width interval returns lo exactly.
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform integer in [0, n), n > 0, by rejection so there is no modulo bias.
  std::uint64_t UniformInt(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Draws an index with probability proportional to weights[i]; weights must
  // be non-negative with a positive sum.
  template <typename Range>
  std::size_t Categorical(const Range& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = Uniform01() * total;
    std::size_t last_positive = 0;
    std::size_t i = 0;
    for (double w : weights) {
      if (w > 0.0) {
        last_positive = i;
        if (u < w) return i;
        u -= w;
      }
      ++i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saa

#endif  // SAA_RANDOM_H_
