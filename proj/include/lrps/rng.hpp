// Copyright 2026 The lrps Authors.
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

#ifndef LRPS_RNG_HPP
#define LRPS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace lrps {

/// Engine used everywhere. The helpers below avoid std::*_distribution so
/// that streams are reproducible across standard library implementations.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard exponential variate.
inline double exponential(Rng& rng) { return -std::log1p(-uniform01(rng)); }

/// Draws an index from a probability row. Rows that sum to slightly less
/// than one because of rounding fall through to the last positive entry.
inline int categorical(Rng& rng, std::span<const double> probs) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last = static_cast<int>(k);
    acc += probs[k];
    if (u < acc) return last;
  }
  return last;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic child seed for (base, i, j, ...). Independent of thread
/// scheduling, so parallel runs reproduce sequential ones.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(base);
  for (const auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace lrps

#endif  // LRPS_RNG_HPP
