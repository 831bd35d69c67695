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

// Hand-built inputs shared by unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "stmask/tensor.hpp"

namespace fixtures {

struct LabelledFrame {
  stmask::TokenTensor tokens;  // (1, 1, N, C)
  std::vector<int> truth;
};

// Two groups of tokens around e_0 and e_1 with small uniform jitter, placed at
// shuffled positions. Within-group cosine distances stay below 0.01 and
// across-group distances are close to 1.
inline LabelledFrame two_blob_frame(std::size_t na, std::size_t nb, std::size_t channels,
                                    std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> jitter(-0.02f, 0.02f);
  const std::size_t n = na + nb;
  std::vector<int> truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = i < na ? 0 : 1;
  std::shuffle(truth.begin(), truth.end(), gen);
  stmask::TokenTensor x({1, 1, n, channels});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      x(0, 0, i, c) = (static_cast<int>(c) == truth[i] ? 1.0f : 0.0f) + jitter(gen);
    }
  }
  return {x, truth};
}

// B=1, T=2, N=4, C=2. Frame 0 holds two angular groups {0, 1} near 0 deg and
// {2, 3} near 90 deg; frame 1 holds exact copies of the 0 deg and 90 deg
// directions. Token 0 (0 deg) and token 3 (90 deg) coincide with frame-1
// tokens, so they carry the highest temporal density of their groups.
inline stmask::TokenTensor crafted_two_cluster_video() {
  auto polar = [](double deg) {
    const double r = deg * 3.14159265358979323846 / 180.0;
    return std::pair{static_cast<float>(std::cos(r)), static_cast<float>(std::sin(r))};
  };
  const double frame0[] = {0.0, 6.0, 84.0, 90.0};
  const double frame1[] = {0.0, 0.0, 90.0, 90.0};
  stmask::TokenTensor x({1, 2, 4, 2});
  for (std::size_t n = 0; n < 4; ++n) {
    auto [a, b] = polar(frame0[n]);
    x(0, 0, n, 0) = a;
    x(0, 0, n, 1) = b;
    auto [c, d] = polar(frame1[n]);
    x(0, 1, n, 0) = c;
    x(0, 1, n, 1) = d;
  }
  return x;
}

}  // namespace fixtures
