/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Counter-based random numbers (Philox4x32-10, Salmon et al., SC'11).
//
// Every draw is a pure function of (seed, counter), so randomized masks are
// addressed by logical coordinates such as (stream, b, t, cluster) and come
// out identical no matter how the work is split across threads.

#pragma once

#include <array>
#include <cstdint>

namespace stmask {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Draw streams keep unrelated consumers of the same seed apart.
enum class Stream : std::uint32_t {
  kClusterPick = 1,
  kRandomMask = 2,
  kTubeMask = 3,
  kFrameMask = 4,
  kSynthetic = 5,
};

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// 64 random bits addressed by (stream, a, b, c).
  std::uint64_t bits(Stream stream, std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(Stream stream, std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept;

  /// Integer in [0, bound) via multiply-shift; bias is below bound / 2^64.
  std::uint64_t below(std::uint64_t bound, Stream stream, std::uint32_t a, std::uint32_t b,
                      std::uint32_t c) const noexcept;

  /// Standard normal deviate (Box-Muller on two uniforms).
  double normal(Stream stream, std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept;

 private:
  PhiloxKey key_;
};

}  // namespace stmask
