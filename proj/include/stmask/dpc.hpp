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

// Density peaks clustering (Rodriguez & Laio, Science 2014) of the tokens of a
// single frame, with an explicit cluster count.
//
// Procedure on the N x N cosine-distance matrix D:
//   d_c    = quantile of the off-diagonal entries of D at dc_ratio (>= 1e-8)
//   rho_i  = sum_{j != i} exp(-(D_ij / d_c)^2)
//   delta_i = distance to the nearest token ranked above i, where "above"
//            means larger rho, or equal rho and lower index; the top-ranked
//            token takes max_j D_ij instead
//   gamma_i = rho_i * delta_i
// The n_clusters tokens with the largest gamma (ties to lower index) become
// centers. Every other token inherits the label of its nearest higher-ranked
// neighbour, so each chain ends at a center.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stmask/tensor.hpp"

namespace stmask {

/// Partition of one frame's tokens.
///
/// Centers are stored in ascending token order and labels[centers[k]] == k;
/// every label in [0, n_clusters) is used at least once.
struct ClusterAssignment {
  std::vector<std::int32_t> labels;
  std::vector<std::int32_t> centers;
  std::size_t n_clusters = 0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Intermediate quantities of one clustering run, exposed for diagnostics.
struct DpcTrace {
  double cutoff = 0.0;
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<double> gamma;
  // Index of the nearest higher-ranked token; -1 for the top-ranked token.
  std::vector<std::int32_t> nearest_higher;
  ClusterAssignment assignment;
};

/// N_c = max(1, round-half-up(N * (1 - r))), never above N.
/// Throws DomainError unless 0 < r < 1 and N >= 1.
std::size_t cluster_count(std::size_t n_tokens, double mask_ratio);

/// Clusters the rows of `frame_tokens`. Throws DomainError when n_clusters is
/// outside [1, N], dc_ratio outside (0, 1], or a row has zero norm.
ClusterAssignment dpc_cluster(const MatrixView& frame_tokens, std::size_t n_clusters,
                              double dc_ratio);

/// Same as dpc_cluster but also returns rho, delta, gamma and the neighbour
/// links.
DpcTrace dpc_trace(const MatrixView& frame_tokens, std::size_t n_clusters, double dc_ratio);

}  // namespace stmask
