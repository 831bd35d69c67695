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

#include "stmask/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stmask/distance.hpp"
#include "stmask/io.hpp"
#include "stmask/parallel.hpp"

namespace stmask {

std::vector<double> mean_pool(const MatrixView& window_tokens) {
  std::vector<double> out(window_tokens.cols, 0.0);
  for (std::size_t r = 0; r < window_tokens.rows; ++r) {
    const auto row = window_tokens.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  }
  const auto rows = static_cast<double>(window_tokens.rows);
  for (double& v : out) v /= rows;
  return out;
}

std::vector<double> softmax_weighted_pool(const MatrixView& window_tokens,
                                          std::span<const float> query, double temperature) {
  if (!(temperature > 0.0)) {
    throw DomainError("softmax pooling temperature must be > 0, got " + std::to_string(temperature));
  }
  if (query.size() != window_tokens.cols) {
    throw DomainError("softmax pooling query has " + std::to_string(query.size()) +
                      " entries, tokens have " + std::to_string(window_tokens.cols) + " channels");
  }
  std::vector<double> logit(window_tokens.rows);
  for (std::size_t r = 0; r < window_tokens.rows; ++r) {
    const auto row = window_tokens.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += static_cast<double>(row[c]) * query[c];
    logit[r] = acc / temperature;
  }
  const double peak = *std::max_element(logit.begin(), logit.end());
  double total = 0.0;
  for (double& l : logit) {
    l = std::exp(l - peak);
    total += l;
  }
  std::vector<double> out(window_tokens.cols, 0.0);
  for (std::size_t r = 0; r < window_tokens.rows; ++r) {
    const double w = logit[r] / total;
    const auto row = window_tokens.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * row[c];
  }
  return out;
}

std::size_t grid_side(std::size_t n) {
  auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (side * side > n) --side;
  while ((side + 1) * (side + 1) <= n) ++side;
  if (side * side != n || n == 0) {
    throw DomainError("tokens per frame N = " + std::to_string(n) + " is not a perfect square");
  }
  return side;
}

std::vector<float> gather_window(const MatrixView& frame_tokens, std::size_t grid, std::size_t row,
                                 std::size_t col, std::size_t window_side) {
  const auto radius = static_cast<std::ptrdiff_t>(window_side / 2);
  const auto last = static_cast<std::ptrdiff_t>(grid) - 1;
  const std::size_t C = frame_tokens.cols;
  std::vector<float> out;
  out.reserve(window_side * window_side * C);
  for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy) {
    const auto y = std::clamp(static_cast<std::ptrdiff_t>(row) + dy, std::ptrdiff_t{0}, last);
    for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
      const auto x = std::clamp(static_cast<std::ptrdiff_t>(col) + dx, std::ptrdiff_t{0}, last);
      const auto src = frame_tokens.row(static_cast<std::size_t>(y) * grid + static_cast<std::size_t>(x));
      out.insert(out.end(), src.begin(), src.end());
    }
  }
  return out;
}

namespace {

std::vector<double> unit_or_throw(std::vector<double> v, const std::string& what) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError(what + " has zero norm");
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

RelevanceTensor generate_relevance(const TokenTensor& tokens, const TextFeature& text,
                                   const WindowSpec& window, const PoolingOperator& pool) {
  const std::size_t B = tokens.dim(0), T = tokens.dim(1), N = tokens.dim(2), C = tokens.dim(3);
  if (window.side != 1 && window.side != 3) {
    throw DomainError("window side must be 1 or 3, got " + std::to_string(window.side));
  }
  const std::size_t L = grid_side(N);
  if (text.dim(0) != B) {
    throw DomainError("text batch " + std::to_string(text.dim(0)) + " does not match token batch " +
                      std::to_string(B));
  }
  if (text.dim(1) != C) {
    throw DomainError("text feature has " + std::to_string(text.dim(1)) +
                      " channels, tokens have " + std::to_string(C));
  }
  const auto* softmax = std::get_if<SoftmaxPool>(&pool);
  if (softmax != nullptr) {
    if (!(softmax->temperature > 0.0)) throw DomainError("softmax pooling temperature must be > 0");
    if (!softmax->query.empty() && softmax->query.size() != C) {
      throw DomainError("softmax pooling query length must equal C");
    }
  }

  std::vector<std::vector<double>> text_unit(B);
  for (std::size_t b = 0; b < B; ++b) {
    text_unit[b] = unit_vector(text.values().subspan(b * C, C), "text feature b=" + std::to_string(b));
  }

  const std::size_t k2 = window.side * window.side;
  RelevanceTensor out({B, T, N});
  parallel_for(B * T, [&](std::size_t f) {
    const std::size_t b = f / T, t = f % T;
    const MatrixView frame = frame_view(tokens, b, t);
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t c = 0; c < L; ++c) {
        const auto win = gather_window(frame, L, r, c, window.side);
        const MatrixView wv(win, k2, C);
        std::vector<double> pooled;
        if (softmax == nullptr) {
          pooled = mean_pool(wv);
        } else {
          const std::span<const float> query =
              softmax->query.empty() ? text.values().subspan(b * C, C)
                                     : std::span<const float>(softmax->query);
          pooled = softmax_weighted_pool(wv, query, softmax->temperature);
        }
        pooled = unit_or_throw(std::move(pooled), "pooled vector at (b=" + std::to_string(b) +
                                                      ", t=" + std::to_string(t) + ", row=" +
                                                      std::to_string(r) + ", col=" +
                                                      std::to_string(c) + ")");
        out(b, t, r * L + c) =
            static_cast<float>(std::clamp(dot(pooled, text_unit[b]), -1.0, 1.0));
      }
    }
  });
  return out;
}

double mrm_loss(const RelevanceTensor& pred, const RelevanceTensor& target, const MaskTensor& mask) {
  if (pred.shape() != target.shape() || pred.shape() != mask.shape()) {
    throw ValidationError("mrm_loss: pred, target and mask shapes differ");
  }
  const auto p = pred.values();
  const auto q = target.values();
  const auto m = mask.values();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != 1) continue;
    const double d = static_cast<double>(p[i]) - static_cast<double>(q[i]);
    sum += d * d;
    ++count;
  }
  if (count == 0) throw DomainError("mrm_loss: mask has no masked (invisible) positions");
  return sum / static_cast<double>(count);
}

unsigned char relevance_to_gray(float v) noexcept {
  const double g = std::round((static_cast<double>(v) + 1.0) * 0.5 * 255.0);
  return static_cast<unsigned char>(std::clamp(g, 0.0, 255.0));
}

std::vector<std::filesystem::path> write_heatmaps(const RelevanceTensor& relevance,
                                                  const std::filesystem::path& dir) {
  const std::size_t B = relevance.dim(0), T = relevance.dim(1), N = relevance.dim(2);
  const std::size_t L = grid_side(N);
  require_finite(relevance.values(), "relevance tensor");
  std::vector<std::filesystem::path> written;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) {
      std::string bytes = "P5\n" + std::to_string(L) + " " + std::to_string(L) + "\n255\n";
      for (std::size_t n = 0; n < N; ++n) {
        bytes.push_back(static_cast<char>(relevance_to_gray(relevance(b, t, n))));
      }
      auto path = dir / ("rel_b" + std::to_string(b) + "_t" + std::to_string(t) + ".pgm");
      write_file_atomic(path, bytes);
      written.push_back(std::move(path));
    }
  }
  return written;
}

}  // namespace stmask
