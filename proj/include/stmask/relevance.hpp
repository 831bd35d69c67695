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

// Video-text relevance from locally pooled tokens, and the masked relevance
// reconstruction loss.
//
// Each frame's N = L*L tokens are laid out row-major on an L x L grid and
// replicate-padded by (k - 1) / 2 cells. A k x k window centred on every
// original cell is pooled to one vector, and the relevance of that cell is
// the cosine between the pooled vector and the sample's text feature.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <variant>
#include <vector>

#include "stmask/tensor.hpp"

namespace stmask {

struct WindowSpec {
  std::size_t side = 3;  // 1 or 3
};

struct MeanPool {};

/// softmax(rows . query / temperature)-weighted sum of the window rows. An
/// empty query means "use the sample's text feature as the query".
struct SoftmaxPool {
  std::vector<float> query;
  double temperature = 1.0;
};

/// Stand-in for a learned attentive pooler; Mean is the default.
using PoolingOperator = std::variant<MeanPool, SoftmaxPool>;

/// Arithmetic mean of the rows, accumulated in real64.
std::vector<double> mean_pool(const MatrixView& window_tokens);

/// Softmax-weighted row sum. Throws DomainError unless temperature > 0 and
/// query has one entry per column.
std::vector<double> softmax_weighted_pool(const MatrixView& window_tokens,
                                          std::span<const float> query, double temperature);

/// Gathers the k*k window (row-major over offsets -r..r, replicate padding)
/// around grid cell (row, col) of a frame into a k*k x C buffer.
std::vector<float> gather_window(const MatrixView& frame_tokens, std::size_t grid_side,
                                 std::size_t row, std::size_t col, std::size_t window_side);

/// Integer L with L * L == n; throws DomainError otherwise.
std::size_t grid_side(std::size_t n);

/// (B, T, N) relevance tensor. Throws DomainError when N is not a perfect
/// square, the window side is not 1 or 3, the text batch differs from the
/// token batch, or a pooled/text vector has zero norm (the message names
/// b, t and the grid cell).
RelevanceTensor generate_relevance(const TokenTensor& tokens, const TextFeature& text,
                                   const WindowSpec& window = {},
                                   const PoolingOperator& pool = MeanPool{});

/// Mean squared difference between pred and target over masked (mask == 1)
/// positions. Throws ValidationError on a shape mismatch and DomainError when
/// no position is masked.
double mrm_loss(const RelevanceTensor& pred, const RelevanceTensor& target,
                const MaskTensor& mask);

/// Writes one binary PGM (P5, maxval 255, L x L) per (b, t) into `dir`, named
/// rel_b{b}_t{t}.pgm, mapping relevance -1..1 linearly to 0..255.
/// Returns the written paths.
std::vector<std::filesystem::path> write_heatmaps(const RelevanceTensor& relevance,
                                                  const std::filesystem::path& dir);

/// Gray level for one relevance value: round((v + 1) / 2 * 255), clamped.
unsigned char relevance_to_gray(float v) noexcept;

}  // namespace stmask
