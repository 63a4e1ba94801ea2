// Copyright 2026 The radiocast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace radiocast {

/// Every random stream in the library is a 64-bit Mersenne Twister. The
/// engine is fully specified by the standard, so replays are bit-identical
/// across platforms; the helpers below avoid std::*_distribution for the same
/// reason.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream of station `node` in a trial seeded with `seed`:
///   Rng(mix64(mix64(seed) + node)).
/// For a fixed seed, distinct nodes get distinct 64-bit engine seeds.
Rng derive_rng(std::uint64_t seed, std::uint64_t node);

/// Seed of trial `index` under base seed `base`:
///   mix64(base + (index + 1) * 0x9E3779B97F4A7C15).
/// Injective in `index` for a fixed base (odd multiplier, bijective mixer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Uniform integer in [0, bound) by rejection on the top of the 64-bit range.
/// `bound` must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in (0, 1] with 53 bits of resolution.
double uniform_open_closed(Rng& rng);

/// Uniform double in [0, 1).
double uniform_unit(Rng& rng);

/// Fair coin from the top bit of one draw.
inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace radiocast
