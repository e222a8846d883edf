// Copyright (c) the mintmc authors
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

#ifndef MINTMC_RNG_HPP
#define MINTMC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mintmc {

// Stream ids used by the samplers. A run owns streams (seed, base + offset);
// chain k of a multi-chain sampler uses base = k * kStreamStride. Keeping the
// layout public lets tests align single-chain samplers with chain 0 of a
// ladder run.
namespace streams {
inline constexpr std::uint64_t kProposal = 0;
inline constexpr std::uint64_t kAccept = 1;
inline constexpr std::uint64_t kBatchSeed = 2;
inline constexpr std::uint64_t kMoveSelect = 3;
inline constexpr std::uint64_t kJumpSelect = 4;
inline constexpr std::uint64_t kStreamStride = 8;
// Stream id under which a mini-batch regenerates its indices from its seed.
inline constexpr std::uint64_t kBatchRegen = 0x6d696e7462617463ULL;
// Stream id for synthetic data generation.
inline constexpr std::uint64_t kDataGen = 0x6d696e7464617461ULL;
}  // namespace streams

/// Deterministic counter-free PRNG stream (PCG32, O'Neill 2014).
///
/// Identical (seed, stream) pairs reproduce identical draws; distinct stream
/// ids select statistically independent sequences. All derived draws
/// (uniforms, normals, bounded integers) are implemented here rather than via
/// <random> distributions so that trajectories are bit-stable across
/// standard library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(0u), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const std::uint32_t xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32u) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11u) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, bound), bound >= 1. Unbiased (rejection).
  std::uint64_t next_below(std::uint64_t bound) {
    // Threshold rejection: accept r >= 2^64 mod bound.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mintmc

#endif  // MINTMC_RNG_HPP
