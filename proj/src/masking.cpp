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

#include "stmask/masking.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "stmask/parallel.hpp"
#include "stmask/rng.hpp"

namespace stmask {

MaskStrategy parse_mask_strategy(std::string_view name) {
  if (name == "cluster-st") return MaskStrategy::kClusterST;
  if (name == "cluster-s") return MaskStrategy::kClusterS;
  if (name == "random") return MaskStrategy::kRandom;
  if (name == "tube") return MaskStrategy::kTube;
  if (name == "frame") return MaskStrategy::kFrame;
  throw DomainError("unknown mask strategy '" + std::string(name) +
                    "' (cluster-st | cluster-s | random | tube | frame)");
}

std::string_view to_string(MaskStrategy strategy) noexcept {
  switch (strategy) {
    case MaskStrategy::kClusterST: return "cluster-st";
    case MaskStrategy::kClusterS: return "cluster-s";
    case MaskStrategy::kRandom: return "random";
    case MaskStrategy::kTube: return "tube";
    case MaskStrategy::kFrame: return "frame";
  }
  return "unknown";
}

namespace {

void check_shape(const FrameShape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw ValidationError("mask shape dims must all be >= 1");
  }
}

void require_video(const TokenTensor& tokens) {
  if (tokens.dim(1) < 2) {
    throw DomainError("cluster-wise spatio-temporal masking needs T >= 2 frames, got T = " +
                      std::to_string(tokens.dim(1)) +
                      "; use the cluster-s strategy (cluster_s_mask) for images");
  }
}

// Retains the `keep` entries with the smallest keys (lower index on ties).
void retain_smallest(std::span<const std::uint64_t> keys, std::size_t keep,
                     std::span<std::uint8_t> mask) {
  std::vector<std::uint32_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  std::fill(mask.begin(), mask.end(), std::uint8_t{1});
  for (std::size_t k = 0; k < keep; ++k) mask[idx[k]] = 0;
}

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

}  // namespace

std::vector<ClusterAssignment> cluster_frames(const TokenTensor& tokens, const MaskConfig& cfg) {
  const std::size_t B = tokens.dim(0), T = tokens.dim(1), N = tokens.dim(2);
  const std::size_t n_clusters = cluster_count(N, cfg.mask_ratio);
  std::vector<ClusterAssignment> out(B * T);
  parallel_for(B * T, [&](std::size_t f) {
    out[f] = dpc_cluster(frame_view(tokens, f / T, f % T), n_clusters, cfg.dc_ratio);
  });
  return out;
}

MaskTensor scatter_cluster_argmax(const FrameShape& shape, std::span<const std::int32_t> labels,
                                  const DensityTensor& density, ClusterScoring scoring) {
  check_shape(shape);
  const std::size_t frames = shape[0] * shape[1];
  const std::size_t N = shape[2];
  if (labels.size() != frames * N || density.shape() != shape) {
    throw ValidationError("scatter_cluster_argmax: labels/density do not match the mask shape");
  }

  // Global cluster ids: frame-local label + cumulative cluster count of the
  // preceding frames.
  std::vector<std::size_t> offset(frames + 1, 0);
  for (std::size_t f = 0; f < frames; ++f) {
    std::int32_t max_label = -1;
    for (std::size_t n = 0; n < N; ++n) {
      const std::int32_t l = labels[f * N + n];
      if (l < 0) throw ValidationError("scatter_cluster_argmax: negative cluster label");
      max_label = std::max(max_label, l);
    }
    offset[f + 1] = offset[f] + static_cast<std::size_t>(max_label) + 1;
  }
  const std::size_t total = offset[frames];
  std::vector<std::size_t> global(frames * N);
  for (std::size_t i = 0; i < global.size(); ++i) {
    global[i] = static_cast<std::size_t>(labels[i]) + offset[i / N];
  }

  const auto rho = density.values();
  std::vector<double> score(rho.begin(), rho.end());
  if (scoring == ClusterScoring::kSumNormalized) {
    std::vector<double> sum(total, 0.0);
    for (std::size_t i = 0; i < score.size(); ++i) sum[global[i]] += score[i];
    for (std::size_t i = 0; i < score.size(); ++i) score[i] /= sum[global[i]] + 1e-12;
  }

  std::vector<double> best(total, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < score.size(); ++i) best[global[i]] = std::max(best[global[i]], score[i]);
  std::vector<std::size_t> winner(total, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (score[i] == best[global[i]]) winner[global[i]] = std::min(winner[global[i]], i);
  }

  MaskTensor mask(shape);
  auto m = mask.values();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = winner[global[i]] == i ? 0 : 1;
  return mask;
}

MaskTensor cluster_st_mask(const TokenTensor& tokens, const MaskConfig& cfg) {
  require_video(tokens);
  const auto clusters = cluster_frames(tokens, cfg);
  const DensityTensor density = temporal_density(tokens, cfg.dc_ratio, cfg.kernel);
  const std::size_t N = tokens.dim(2);
  std::vector<std::int32_t> labels(clusters.size() * N);
  for (std::size_t f = 0; f < clusters.size(); ++f) {
    std::copy(clusters[f].labels.begin(), clusters[f].labels.end(),
              labels.begin() + static_cast<std::ptrdiff_t>(f * N));
  }
  return scatter_cluster_argmax(frame_shape(tokens), labels, density,
                                ClusterScoring::kSumNormalized);
}

MaskTensor naive_cluster_st_mask(const TokenTensor& tokens, const MaskConfig& cfg) {
  require_video(tokens);
  const std::size_t B = tokens.dim(0), T = tokens.dim(1), N = tokens.dim(2);
  const std::size_t n_clusters = cluster_count(N, cfg.mask_ratio);
  const DensityTensor density = temporal_density_reference(tokens, cfg.dc_ratio, cfg.kernel);
  MaskTensor mask(frame_shape(tokens), std::uint8_t{1});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      const auto assignment = dpc_cluster(frame_view(tokens, b, t), n_clusters, cfg.dc_ratio);
      for (std::size_t k = 0; k < assignment.n_clusters; ++k) {
        std::size_t best = N;
        for (std::size_t n = 0; n < N; ++n) {
          if (assignment.labels[n] != static_cast<std::int32_t>(k)) continue;
          if (best == N || density(b, t, n) > density(b, t, best)) best = n;
        }
        mask(b, t, best) = 0;
      }
    }
  }
  return mask;
}

MaskTensor cluster_s_mask(const TokenTensor& tokens, const MaskConfig& cfg) {
  const std::size_t T = tokens.dim(1), N = tokens.dim(2);
  const auto clusters = cluster_frames(tokens, cfg);
  const CounterRng rng(cfg.seed);
  MaskTensor mask(frame_shape(tokens), std::uint8_t{1});
  parallel_for(clusters.size(), [&](std::size_t f) {
    const ClusterAssignment& a = clusters[f];
    std::vector<std::vector<std::size_t>> members(a.n_clusters);
    for (std::size_t n = 0; n < N; ++n) members[static_cast<std::size_t>(a.labels[n])].push_back(n);
    for (std::size_t k = 0; k < a.n_clusters; ++k) {
      const std::uint64_t pick =
          rng.below(members[k].size(), Stream::kClusterPick, u32(f / T), u32(f % T), u32(k));
      mask(f / T, f % T, members[k][pick]) = 0;
    }
  });
  return mask;
}

MaskTensor random_mask(const FrameShape& shape, const MaskConfig& cfg) {
  check_shape(shape);
  const std::size_t T = shape[1], N = shape[2];
  const std::size_t keep = cluster_count(N, cfg.mask_ratio);
  const CounterRng rng(cfg.seed);
  MaskTensor mask(shape);
  parallel_for(shape[0] * T, [&](std::size_t f) {
    std::vector<std::uint64_t> keys(N);
    for (std::size_t n = 0; n < N; ++n) {
      keys[n] = rng.bits(Stream::kRandomMask, u32(f / T), u32(f % T), u32(n));
    }
    retain_smallest(keys, keep, mask.values().subspan(f * N, N));
  });
  return mask;
}

MaskTensor tube_mask(const FrameShape& shape, const MaskConfig& cfg) {
  check_shape(shape);
  const std::size_t B = shape[0], T = shape[1], N = shape[2];
  const std::size_t keep = cluster_count(N, cfg.mask_ratio);
  const CounterRng rng(cfg.seed);
  MaskTensor mask(shape);
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<std::uint64_t> keys(N);
    for (std::size_t n = 0; n < N; ++n) keys[n] = rng.bits(Stream::kTubeMask, u32(b), 0, u32(n));
    auto first = mask.values().subspan(mask.offset(b, 0, 0), N);
    retain_smallest(keys, keep, first);
    for (std::size_t t = 1; t < T; ++t) {
      std::copy(first.begin(), first.end(), mask.values().begin() +
                                                static_cast<std::ptrdiff_t>(mask.offset(b, t, 0)));
    }
  }
  return mask;
}

std::size_t framewise_retained_frames(std::size_t frames, double mask_ratio) {
  return cluster_count(frames, mask_ratio);
}

MaskTensor framewise_mask(const FrameShape& shape, const MaskConfig& cfg) {
  check_shape(shape);
  const std::size_t B = shape[0], T = shape[1], N = shape[2];
  const std::size_t keep = framewise_retained_frames(T, cfg.mask_ratio);
  const CounterRng rng(cfg.seed);
  MaskTensor mask(shape, std::uint8_t{1});
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<std::uint64_t> keys(T);
    for (std::size_t t = 0; t < T; ++t) keys[t] = rng.bits(Stream::kFrameMask, u32(b), u32(t), 0);
    std::vector<std::uint8_t> frame_mask(T);
    retain_smallest(keys, keep, frame_mask);
    for (std::size_t t = 0; t < T; ++t) {
      if (frame_mask[t] == 0) {
        auto row = mask.values().subspan(mask.offset(b, t, 0), N);
        std::fill(row.begin(), row.end(), std::uint8_t{0});
      }
    }
  }
  return mask;
}

MaskTensor make_mask(MaskStrategy strategy, const TokenTensor& tokens, const MaskConfig& cfg) {
  switch (strategy) {
    case MaskStrategy::kClusterST: return cluster_st_mask(tokens, cfg);
    case MaskStrategy::kClusterS: return cluster_s_mask(tokens, cfg);
    case MaskStrategy::kRandom: return random_mask(frame_shape(tokens), cfg);
    case MaskStrategy::kTube: return tube_mask(frame_shape(tokens), cfg);
    case MaskStrategy::kFrame: return framewise_mask(frame_shape(tokens), cfg);
  }
  throw DomainError("unknown mask strategy");
}

double leakage_score(const MaskTensor& mask, const DensityTensor& density) {
  if (mask.shape() != density.shape()) {
    throw ValidationError("leakage_score: mask and density shapes differ");
  }
  const auto m = mask.values();
  const auto d = density.values();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) {
      sum += d[i];
      ++count;
    }
  }
  if (count == 0) throw DomainError("leakage_score: mask retains no positions");
  return sum / static_cast<double>(count);
}

std::size_t retained_in_frame(const MaskTensor& mask, std::size_t b, std::size_t t) {
  const auto row = mask.values().subspan(mask.offset(b, t, 0), mask.dim(2));
  return static_cast<std::size_t>(std::count(row.begin(), row.end(), std::uint8_t{0}));
}

}  // namespace stmask
