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

#include "stmask/synthetic.hpp"

#include <cmath>
#include <string>

#include "stmask/relevance.hpp"
#include "stmask/rng.hpp"

namespace stmask {

namespace {

// Counter layout for Stream::kSynthetic draws: a = sample, b = slot, c = channel.
// Slot 0 / 1 are the background / blob prototypes; token noise uses
// slot 2 + t * N + n.
constexpr std::uint32_t kBackgroundSlot = 0;
constexpr std::uint32_t kBlobSlot = 1;
constexpr std::uint32_t kFirstNoiseSlot = 2;

}  // namespace

std::size_t blob_side_for(std::size_t grid) { return std::max<std::size_t>(1, grid / 3); }

bool in_blob(const SyntheticSpec& spec, std::size_t t, std::size_t row, std::size_t col) {
  const std::size_t L = grid_side(spec.tokens);
  const std::size_t side = blob_side_for(L);
  const std::size_t top = (L - side) / 2;
  const std::size_t left = (t * spec.motion) % L;
  if (row < top || row >= top + side) return false;
  return (col + L - left) % L < side;
}

SyntheticVideo generate_synthetic(const SyntheticSpec& spec) {
  if (spec.batch == 0 || spec.frames == 0 || spec.tokens == 0 || spec.channels == 0) {
    throw DomainError("synthetic dims must all be >= 1");
  }
  const std::size_t L = grid_side(spec.tokens);
  if (spec.motion >= L) {
    throw DomainError("motion (" + std::to_string(spec.motion) + ") must be below the grid side " +
                      std::to_string(L));
  }
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    throw DomainError("noise must be finite and >= 0");
  }
  const std::size_t B = spec.batch, T = spec.frames, N = spec.tokens, C = spec.channels;
  if (T * N + kFirstNoiseSlot > 0xffffffffu || C > 0xffffffffu || B > 0xffffffffu) {
    throw DomainError("synthetic dims exceed the generator's counter range");
  }
  const CounterRng rng(spec.seed);
  auto draw = [&](std::size_t b, std::size_t slot, std::size_t c) {
    return rng.normal(Stream::kSynthetic, static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(c));
  };

  SyntheticVideo out{TokenTensor({B, T, N, C}), TextFeature({B, C}), L, blob_side_for(L)};
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<double> background(C), blob(C);
    for (std::size_t c = 0; c < C; ++c) {
      background[c] = draw(b, kBackgroundSlot, c);
      blob[c] = draw(b, kBlobSlot, c);
      out.text(b, c) = static_cast<float>(blob[c]);
    }
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t n = 0; n < N; ++n) {
        const auto& proto = in_blob(spec, t, n / L, n % L) ? blob : background;
        const std::size_t slot = kFirstNoiseSlot + t * N + n;
        for (std::size_t c = 0; c < C; ++c) {
          const double jitter = spec.noise == 0.0 ? 0.0 : spec.noise * draw(b, slot, c);
          out.tokens(b, t, n, c) = static_cast<float>(proto[c] + jitter);
        }
      }
    }
  }
  return out;
}

}  // namespace stmask
