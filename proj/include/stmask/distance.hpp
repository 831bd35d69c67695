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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stmask/tensor.hpp"

namespace stmask {

/// Lower bound applied to every cutoff distance so that kernels stay finite
/// on frames of identical tokens.
inline constexpr double kMinCutoff = 1e-8;

/// Unit-normalized real64 copy of `v`. Throws DomainError mentioning `name`
/// when the Euclidean norm is zero (or not finite).
std::vector<double> unit_vector(std::span<const float> v, const std::string& name);

/// Sequential real64 dot product. The accumulation order is fixed so every
/// caller gets bit-identical results for identical inputs.
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Cosine distance 1 - <u, v> of two unit vectors, clamped to [0, 2].
double unit_distance(std::span<const double> u, std::span<const double> v) noexcept;

/// Semantic distance 1 - cos(u, v), in [0, 2].
///
/// Both vectors are normalized to unit length first; a zero-norm vector is a
/// DomainError naming "u" or "v".
double semantic_distance(std::span<const float> u, std::span<const float> v);

/// Unit-normalizes every row of `m` into one contiguous rows x cols buffer.
/// A zero-norm row throws DomainError with the row index.
std::vector<double> normalize_rows(const MatrixView& m);

/// N x N matrix of semantic distances between the rows of `frame_tokens`,
/// row-major. Symmetric with an exactly zero diagonal.
std::vector<double> pairwise_distance_matrix(const MatrixView& frame_tokens);

/// Linear-interpolation quantile at fractional rank q * (n - 1) of the sorted
/// values. Throws DomainError for an empty input or q outside [0, 1].
double quantile(std::vector<double> values, double q);

/// Same result as quantile(), computed with selection instead of a full sort.
/// Reorders `values`.
double quantile_select(std::span<double> values, double q);

/// quantile(distances, ratio) clamped below by kMinCutoff. ratio must lie in
/// (0, 1].
double cutoff_distance(std::vector<double> distances, double ratio);

}  // namespace stmask
