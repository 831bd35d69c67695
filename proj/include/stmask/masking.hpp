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

// Spatio-temporal mask generation.
//
// All strategies return a MaskTensor with 1 = masked (dropped before the
// student encoder) and 0 = retained. Ties are always broken toward the lower
// token index and every random draw is addressed by logical coordinates, so
// outputs are reproducible for a fixed seed at any thread count.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stmask/dpc.hpp"
#include "stmask/tensor.hpp"
#include "stmask/temporal_density.hpp"

namespace stmask {

struct MaskConfig {
  double mask_ratio = 0.9;
  double dc_ratio = 0.2;
  DensityKernel kernel = DensityKernel::kGaussianNormalized;
  std::uint64_t seed = 0;

  static MaskConfig video() { return {}; }
  static MaskConfig image() {
    MaskConfig cfg;
    cfg.mask_ratio = 0.75;
    return cfg;
  }
};

enum class MaskStrategy { kClusterST, kClusterS, kRandom, kTube, kFrame };

MaskStrategy parse_mask_strategy(std::string_view name);  // cluster-st | cluster-s | random | tube | frame
std::string_view to_string(MaskStrategy strategy) noexcept;
inline constexpr MaskStrategy kAllStrategies[] = {MaskStrategy::kFrame, MaskStrategy::kRandom,
                                                  MaskStrategy::kTube, MaskStrategy::kClusterS,
                                                  MaskStrategy::kClusterST};

/// Runs dpc_cluster on every frame with N_c = cluster_count(N, r) clusters.
/// Result is indexed by b * T + t.
std::vector<ClusterAssignment> cluster_frames(const TokenTensor& tokens, const MaskConfig& cfg);

/// How scores are formed before the per-cluster argmax.
///   kRaw:           score = rho
///   kSumNormalized: score = rho / (sum of rho over the cluster + 1e-12),
///                   the cluster-wise normalization of the batched formulation
enum class ClusterScoring { kRaw, kSumNormalized };

/// Batched per-cluster argmax over all frames at once.
///
/// Per-frame labels (flat, B*T*N) are shifted by the cumulative cluster
/// counts of the preceding frames into global cluster ids; per-cluster sums
/// and maxima are scatter-reduced over those ids and every token whose score
/// is not its cluster's maximum is masked. Among equal maxima only the lowest
/// index is retained.
MaskTensor scatter_cluster_argmax(const FrameShape& shape, std::span<const std::int32_t> labels,
                                  const DensityTensor& density, ClusterScoring scoring);

/// Cluster-wise spatio-temporal masking: per frame keep the single token of
/// highest temporal density in each cluster. Throws DomainError if T < 2.
MaskTensor cluster_st_mask(const TokenTensor& tokens, const MaskConfig& cfg);

/// Same contract as cluster_st_mask written as explicit per-frame,
/// per-cluster loops over the reference density; used as the oracle.
MaskTensor naive_cluster_st_mask(const TokenTensor& tokens, const MaskConfig& cfg);

/// Cluster-wise spatial masking: one uniformly drawn token kept per cluster,
/// the draw keyed by (seed, b, t, cluster). Accepts T = 1.
MaskTensor cluster_s_mask(const TokenTensor& tokens, const MaskConfig& cfg);

/// Keeps cluster_count(N, r) uniformly chosen tokens in every frame.
MaskTensor random_mask(const FrameShape& shape, const MaskConfig& cfg);

/// One uniformly chosen set of cluster_count(N, r) positions per sample,
/// repeated over all frames.
MaskTensor tube_mask(const FrameShape& shape, const MaskConfig& cfg);

/// Keeps framewise_retained_frames(T, r) whole frames per sample and masks
/// the others completely.
MaskTensor framewise_mask(const FrameShape& shape, const MaskConfig& cfg);

/// max(1, round-half-up(T * (1 - r))), at most T.
std::size_t framewise_retained_frames(std::size_t frames, double mask_ratio);

/// Dispatches to the strategy's generator.
MaskTensor make_mask(MaskStrategy strategy, const TokenTensor& tokens, const MaskConfig& cfg);

/// Mean temporal density over retained (mask == 0) positions. Throws
/// ValidationError on a shape mismatch and DomainError if nothing is retained.
double leakage_score(const MaskTensor& mask, const DensityTensor& density);

/// Number of retained entries in frame (b, t).
std::size_t retained_in_frame(const MaskTensor& mask, std::size_t b, std::size_t t);

}  // namespace stmask
