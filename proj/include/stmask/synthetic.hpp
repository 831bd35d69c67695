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

#pragma once

#include <cstdint>

#include "stmask/tensor.hpp"

namespace stmask {

/// Moving-blob video: every frame is a background of one prototype vector
/// with a square blob of a second prototype that shifts `motion` grid cells
/// to the right per frame (wrapping around). Each token gets independent
/// Gaussian noise of scale `noise`.
struct SyntheticSpec {
  std::size_t batch = 1;
  std::size_t frames = 8;
  std::size_t tokens = 196;  // must be a perfect square
  std::size_t channels = 64;
  std::size_t motion = 1;    // < grid side
  double noise = 0.05;
  std::uint64_t seed = 0;
};

struct SyntheticVideo {
  TokenTensor tokens;
  TextFeature text;  // the blob prototype of each sample
  std::size_t grid = 0;
  std::size_t blob_side = 0;
};

/// Side of the square blob for an L x L grid: max(1, L / 3).
std::size_t blob_side_for(std::size_t grid);

/// Whether grid cell (row, col) of frame t lies inside the blob.
bool in_blob(const SyntheticSpec& spec, std::size_t t, std::size_t row, std::size_t col);

/// Deterministic under spec.seed on every platform (counter-based draws).
/// Throws DomainError for invalid parameters.
SyntheticVideo generate_synthetic(const SyntheticSpec& spec);

}  // namespace stmask
