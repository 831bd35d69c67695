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

#include "stmask/dpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stmask/distance.hpp"

namespace stmask {

std::size_t cluster_count(std::size_t n_tokens, double mask_ratio) {
  if (n_tokens == 0) throw DomainError("cluster_count: N must be >= 1");
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
    throw DomainError("mask ratio must lie in (0, 1), got " + std::to_string(mask_ratio));
  }
  const double exact = static_cast<double>(n_tokens) * (1.0 - mask_ratio);
  // The 1e-9 slack absorbs representation error in 1 - r (e.g. 1 - 0.9 is
  // slightly below 0.1) so exact halves still round up.
  const auto rounded = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
  return std::clamp<std::size_t>(rounded, 1, n_tokens);
}

DpcTrace dpc_trace(const MatrixView& frame_tokens, std::size_t n_clusters, double dc_ratio) {
  const std::size_t n = frame_tokens.rows;
  if (n == 0) throw DomainError("dpc_cluster: frame has no tokens");
  if (n_clusters < 1 || n_clusters > n) {
    throw DomainError("dpc_cluster: n_clusters = " + std::to_string(n_clusters) +
                      " must lie in [1, " + std::to_string(n) + "]");
  }
  if (!(dc_ratio > 0.0 && dc_ratio <= 1.0)) {
    throw DomainError("dc_ratio must lie in (0, 1], got " + std::to_string(dc_ratio));
  }

  const std::vector<double> dist = pairwise_distance_matrix(frame_tokens);
  DpcTrace tr;
  tr.rho.assign(n, 0.0);
  tr.delta.assign(n, 0.0);
  tr.gamma.assign(n, 0.0);
  tr.nearest_higher.assign(n, -1);

  if (n > 1) {
    std::vector<double> off_diagonal;
    off_diagonal.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) off_diagonal.push_back(dist[i * n + j]);
      }
    }
    tr.cutoff = cutoff_distance(std::move(off_diagonal), dc_ratio);
  } else {
    tr.cutoff = kMinCutoff;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double z = dist[i * n + j] / tr.cutoff;
      acc += std::exp(-z * z);
    }
    tr.rho[i] = acc;
  }

  // Density ranking: larger rho first, lower index on ties.
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int32_t a, std::int32_t b) { return tr.rho[a] > tr.rho[b]; });

  const std::size_t top = static_cast<std::size_t>(order[0]);
  for (std::size_t j = 0; j < n; ++j) tr.delta[top] = std::max(tr.delta[top], dist[top * n + j]);
  for (std::size_t p = 1; p < n; ++p) {
    const auto i = static_cast<std::size_t>(order[p]);
    double best = 0.0;
    std::int32_t best_j = -1;
    for (std::size_t q = 0; q < p; ++q) {
      const std::int32_t j = order[q];
      const double d = dist[i * n + static_cast<std::size_t>(j)];
      if (best_j < 0 || d < best || (d == best && j < best_j)) {
        best = d;
        best_j = j;
      }
    }
    tr.delta[i] = best;
    tr.nearest_higher[i] = best_j;
  }
  for (std::size_t i = 0; i < n; ++i) tr.gamma[i] = tr.rho[i] * tr.delta[i];

  std::vector<std::int32_t> by_gamma(n);
  std::iota(by_gamma.begin(), by_gamma.end(), 0);
  std::stable_sort(by_gamma.begin(), by_gamma.end(),
                   [&](std::int32_t a, std::int32_t b) { return tr.gamma[a] > tr.gamma[b]; });
  std::vector<std::int32_t> centers(by_gamma.begin(),
                                    by_gamma.begin() + static_cast<std::ptrdiff_t>(n_clusters));
  // The density peak has the largest gamma, so it is always selected; keep the
  // chain-termination guarantee explicit anyway.
  if (std::find(centers.begin(), centers.end(), order[0]) == centers.end()) {
    centers.back() = order[0];
  }
  std::sort(centers.begin(), centers.end());

  ClusterAssignment& out = tr.assignment;
  out.n_clusters = n_clusters;
  out.labels.assign(n, -1);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    out.labels[static_cast<std::size_t>(centers[k])] = static_cast<std::int32_t>(k);
  }
  for (std::size_t p = 0; p < n; ++p) {
    const auto i = static_cast<std::size_t>(order[p]);
    if (out.labels[i] < 0) {
      out.labels[i] = out.labels[static_cast<std::size_t>(tr.nearest_higher[i])];
    }
  }
  out.centers = std::move(centers);
  return tr;
}

ClusterAssignment dpc_cluster(const MatrixView& frame_tokens, std::size_t n_clusters,
                              double dc_ratio) {
  return dpc_trace(frame_tokens, n_clusters, dc_ratio).assignment;
}

}  // namespace stmask
