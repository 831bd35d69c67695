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

#include "stmask/rng.hpp"

#include <cmath>
#include <numbers>

namespace stmask {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t CounterRng::bits(Stream stream, std::uint32_t a, std::uint32_t b,
                               std::uint32_t c) const noexcept {
  const auto out = philox4x32({static_cast<std::uint32_t>(stream), a, b, c}, key_);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double CounterRng::uniform(Stream stream, std::uint32_t a, std::uint32_t b,
                           std::uint32_t c) const noexcept {
  return static_cast<double>(bits(stream, a, b, c) >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t bound, Stream stream, std::uint32_t a,
                                std::uint32_t b, std::uint32_t c) const noexcept {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(bits(stream, a, b, c)) * static_cast<unsigned __int128>(bound);
  return static_cast<std::uint64_t>(wide >> 64);
}

double CounterRng::normal(Stream stream, std::uint32_t a, std::uint32_t b,
                          std::uint32_t c) const noexcept {
  const auto out = philox4x32({static_cast<std::uint32_t>(stream), a, b, c}, key_);
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace stmask
