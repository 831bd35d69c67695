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

#include <string_view>

#include "stmask/tensor.hpp"

namespace stmask {

/// Kernel turning a cross-frame distance d into a density contribution.
///   kExponential:        exp(-d / d_c), summed
///   kGaussianNormalized: exp(-(d / d_c)^2), summed and divided by N
enum class DensityKernel { kExponential, kGaussianNormalized };

DensityKernel parse_density_kernel(std::string_view name);  // "exp" | "gauss-norm"
std::string_view to_string(DensityKernel kernel) noexcept;

/// Temporal density of every token against all tokens of the other frames of
/// the same sample.
///
/// For frame (b, t) the cutoff d_c is the dc_ratio quantile of all
/// N * (T - 1) * N cross-frame distances of that frame, clamped to >= 1e-8.
/// Rows are parallelized over (b, t); each row is reduced in a fixed order.
///
/// Throws DomainError when T < 2 (images have no temporal neighbours; use
/// cluster_s_mask), dc_ratio is outside (0, 1], or a token has zero norm.
DensityTensor temporal_density(const TokenTensor& tokens, double dc_ratio,
                               DensityKernel kernel = DensityKernel::kGaussianNormalized);

/// Straight five-loop evaluation over (b, t, n, i, j) calling
/// semantic_distance on raw tokens and taking the cutoff by full sort.
/// Slow; used as the reference path by naive masking and the benchmark.
DensityTensor temporal_density_reference(const TokenTensor& tokens, double dc_ratio,
                                         DensityKernel kernel = DensityKernel::kGaussianNormalized);

}  // namespace stmask
