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

#include "stmask/distance.hpp"

#include <algorithm>
#include <cmath>

namespace stmask {

void require_finite(std::span<const float> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError(what + " contains a non-finite value at flat index " +
                            std::to_string(i));
    }
  }
}

std::vector<double> unit_vector(std::span<const float> v, const std::string& name) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("vector " + name + " has zero (or non-finite) Euclidean norm");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) / norm;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double unit_distance(std::span<const double> u, std::span<const double> v) noexcept {
  return std::clamp(1.0 - dot(u, v), 0.0, 2.0);
}

double semantic_distance(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw DomainError("semantic_distance: vectors u and v differ in length");
  }
  const auto uu = unit_vector(u, "u");
  const auto vv = unit_vector(v, "v");
  return unit_distance(uu, vv);
}

std::vector<double> normalize_rows(const MatrixView& m) {
  std::vector<double> out(m.rows * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto unit = unit_vector(m.row(i), "row " + std::to_string(i));
    std::copy(unit.begin(), unit.end(), out.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return out;
}

std::vector<double> pairwise_distance_matrix(const MatrixView& frame_tokens) {
  const std::size_t n = frame_tokens.rows;
  const std::size_t c = frame_tokens.cols;
  const auto unit = normalize_rows(frame_tokens);
  const std::span<const double> all(unit);
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = all.subspan(i * c, c);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = unit_distance(ri, all.subspan(j * c, c));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

namespace {

void check_quantile_args(std::size_t n, double q) {
  if (n == 0) throw DomainError("quantile of an empty multiset");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile level must lie in [0, 1], got " + std::to_string(q));
  }
}

struct Rank {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

Rank fractional_rank(std::size_t n, double q) {
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return {lo, hi, pos - static_cast<double>(lo)};
}

double interpolate(double lo, double hi, double frac) {
  return frac == 0.0 ? lo : lo + frac * (hi - lo);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  check_quantile_args(values.size(), q);
  std::sort(values.begin(), values.end());
  const Rank r = fractional_rank(values.size(), q);
  return interpolate(values[r.lo], values[r.hi], r.frac);
}

double quantile_select(std::span<double> values, double q) {
  check_quantile_args(values.size(), q);
  const Rank r = fractional_rank(values.size(), q);
  auto lo_it = values.begin() + static_cast<std::ptrdiff_t>(r.lo);
  std::nth_element(values.begin(), lo_it, values.end());
  const double lo = *lo_it;
  if (r.frac == 0.0 || r.hi == r.lo) return lo;
  // The next order statistic is the minimum of the upper partition.
  const double hi = *std::min_element(lo_it + 1, values.end());
  return interpolate(lo, hi, r.frac);
}

double cutoff_distance(std::vector<double> distances, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw DomainError("dc_ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
  return std::max(quantile(std::move(distances), ratio), kMinCutoff);
}

}  // namespace stmask
