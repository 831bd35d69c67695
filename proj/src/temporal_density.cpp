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

#include "stmask/temporal_density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stmask/distance.hpp"
#include "stmask/parallel.hpp"

namespace stmask {

DensityKernel parse_density_kernel(std::string_view name) {
  if (name == "exp") return DensityKernel::kExponential;
  if (name == "gauss-norm") return DensityKernel::kGaussianNormalized;
  throw DomainError("unknown density kernel '" + std::string(name) + "' (exp | gauss-norm)");
}

std::string_view to_string(DensityKernel kernel) noexcept {
  return kernel == DensityKernel::kExponential ? "exp" : "gauss-norm";
}

namespace {

void check_args(const TokenTensor& tokens, double dc_ratio) {
  if (tokens.empty()) throw ValidationError("temporal_density: empty token tensor");
  if (tokens.dim(1) < 2) {
    throw DomainError("temporal density needs T >= 2 frames, got T = " +
                      std::to_string(tokens.dim(1)) +
                      "; use cluster-wise spatial masking (cluster_s_mask) for images");
  }
  if (!(dc_ratio > 0.0 && dc_ratio <= 1.0)) {
    throw DomainError("dc_ratio must lie in (0, 1], got " + std::to_string(dc_ratio));
  }
}

inline double kernel_term(double d, double cutoff, DensityKernel kernel) {
  const double z = d / cutoff;
  return kernel == DensityKernel::kExponential ? std::exp(-z) : std::exp(-z * z);
}

inline double finish(double sum, std::size_t n, DensityKernel kernel) {
  return kernel == DensityKernel::kExponential ? sum : sum / static_cast<double>(n);
}

std::string token_name(std::size_t b, std::size_t t, std::size_t n) {
  return "token (b=" + std::to_string(b) + ", t=" + std::to_string(t) + ", n=" +
         std::to_string(n) + ")";
}

}  // namespace

DensityTensor temporal_density(const TokenTensor& tokens, double dc_ratio, DensityKernel kernel) {
  check_args(tokens, dc_ratio);
  const std::size_t B = tokens.dim(0), T = tokens.dim(1), N = tokens.dim(2), C = tokens.dim(3);
  const std::size_t frames = B * T;

  std::vector<double> unit(tokens.size());
  parallel_for(frames, [&](std::size_t f) {
    const auto src = tokens.values().subspan(f * N * C, N * C);
    for (std::size_t n = 0; n < N; ++n) {
      const auto u = unit_vector(src.subspan(n * C, C), token_name(f / T, f % T, n));
      std::copy(u.begin(), u.end(), unit.begin() + static_cast<std::ptrdiff_t>((f * N + n) * C));
    }
  });
  const std::span<const double> all(unit);

  DensityTensor out({B, T, N});
  const std::size_t row_len = (T - 1) * N;
  parallel_for(frames, [&](std::size_t f) {
    const std::size_t b = f / T;
    const std::size_t t = f % T;
    // dist[n][k]: distance from token n of frame t to the k-th token of the
    // other frames, enumerated by ascending frame then token index.
    std::vector<double> dist(N * row_len);
    for (std::size_t n = 0; n < N; ++n) {
      const auto x = all.subspan((f * N + n) * C, C);
      double* row = dist.data() + n * row_len;
      std::size_t k = 0;
      for (std::size_t i = 0; i < T; ++i) {
        if (i == t) continue;
        const auto other = all.subspan((b * T + i) * N * C, N * C);
        for (std::size_t j = 0; j < N; ++j) row[k++] = unit_distance(x, other.subspan(j * C, C));
      }
    }
    std::vector<double> scratch(dist);
    const double cutoff = std::max(quantile_select(scratch, dc_ratio), kMinCutoff);
    for (std::size_t n = 0; n < N; ++n) {
      const double* row = dist.data() + n * row_len;
      double sum = 0.0;
      for (std::size_t k = 0; k < row_len; ++k) sum += kernel_term(row[k], cutoff, kernel);
      out(b, t, n) = static_cast<float>(finish(sum, N, kernel));
    }
  });
  return out;
}

DensityTensor temporal_density_reference(const TokenTensor& tokens, double dc_ratio,
                                         DensityKernel kernel) {
  check_args(tokens, dc_ratio);
  const std::size_t B = tokens.dim(0), T = tokens.dim(1), N = tokens.dim(2), C = tokens.dim(3);
  auto token = [&](std::size_t b, std::size_t t, std::size_t n) {
    return tokens.values().subspan(tokens.offset(b, t, n, 0), C);
  };
  auto distance = [&](std::size_t b, std::size_t t, std::size_t n, std::size_t i, std::size_t j) {
    try {
      return semantic_distance(token(b, t, n), token(b, i, j));
    } catch (const DomainError&) {
      for (auto [tt, nn] : {std::pair{t, n}, std::pair{i, j}}) {
        unit_vector(token(b, tt, nn), token_name(b, tt, nn));
      }
      throw;
    }
  };

  DensityTensor out({B, T, N});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<double> all;
      all.reserve(N * (T - 1) * N);
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < T; ++i)
          for (std::size_t j = 0; j < N; ++j)
            if (i != t) all.push_back(distance(b, t, n, i, j));
      const double cutoff = cutoff_distance(std::move(all), dc_ratio);
      for (std::size_t n = 0; n < N; ++n) {
        double sum = 0.0;
        for (std::size_t i = 0; i < T; ++i) {
          if (i == t) continue;
          for (std::size_t j = 0; j < N; ++j) {
            sum += kernel_term(distance(b, t, n, i, j), cutoff, kernel);
          }
        }
        out(b, t, n) = static_cast<float>(finish(sum, N, kernel));
      }
    }
  }
  return out;
}

}  // namespace stmask
