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

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stmask/error.hpp"

namespace stmask {

// Multiplies the dims, throwing DimensionOverflowError if the element count
// (times `element_bytes`) cannot be represented.
template <std::size_t Rank>
std::size_t checked_element_count(const std::array<std::size_t, Rank>& shape,
                                  std::size_t element_bytes = 1) {
  std::size_t count = 1;
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  for (std::size_t d : shape) {
    if (d != 0 && count > kMax / d) {
      throw DimensionOverflowError("tensor element count overflows");
    }
    count *= d;
  }
  if (element_bytes != 0 && count > kMax / element_bytes) {
    throw DimensionOverflowError("tensor byte size overflows");
  }
  return count;
}

/// Dense row-major tensor with a compile-time rank and a tag type that keeps
/// semantically different tensors (densities vs. relevances, say) apart.
///
/// Every dim is at least one; an empty tensor cannot be constructed.
template <typename T, std::size_t Rank, typename Tag>
class Tensor {
 public:
  using value_type = T;
  using Shape = std::array<std::size_t, Rank>;
  static constexpr std::size_t kRank = Rank;

  Tensor() = default;

  explicit Tensor(const Shape& shape, T fill = T{}) : shape_(shape) {
    data_.assign(validated_count(shape), fill);
  }

  Tensor(const Shape& shape, std::vector<T> data)
      : shape_(shape), data_(std::move(data)) {
    if (data_.size() != validated_count(shape)) {
      throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape element count");
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename... Idx>
  T& operator()(Idx... idx) {
    return data_[offset(idx...)];
  }
  template <typename... Idx>
  const T& operator()(Idx... idx) const {
    return data_[offset(idx...)];
  }

  template <typename... Idx>
  std::size_t offset(Idx... idx) const noexcept {
    static_assert(sizeof...(Idx) == Rank, "index count must equal rank");
    const std::array<std::size_t, Rank> index{static_cast<std::size_t>(idx)...};
    std::size_t off = 0;
    for (std::size_t i = 0; i < Rank; ++i) off = off * shape_[i] + index[i];
    return off;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t validated_count(const Shape& shape) {
    for (std::size_t d : shape) {
      if (d == 0) throw ValidationError("tensor dims must all be >= 1");
    }
    return checked_element_count(shape, sizeof(T));
  }

  Shape shape_{};
  std::vector<T> data_;
};

struct TokenTag {};
struct TextTag {};
struct MaskTag {};
struct DensityTag {};
struct RelevanceTag {};

/// (B, T, N, C) token features.
using TokenTensor = Tensor<float, 4, TokenTag>;
/// (B, C) pooled text features.
using TextFeature = Tensor<float, 2, TextTag>;
/// (B, T, N); 1 = masked, 0 = retained.
using MaskTensor = Tensor<std::uint8_t, 3, MaskTag>;
/// (B, T, N) temporal densities.
using DensityTensor = Tensor<float, 3, DensityTag>;
/// (B, T, N) video-text relevance in [-1, 1].
using RelevanceTensor = Tensor<float, 3, RelevanceTag>;

using FrameShape = std::array<std::size_t, 3>;

/// Read-only row-major matrix view, used for the N x C tokens of one frame.
struct MatrixView {
  std::span<const float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  MatrixView() = default;
  MatrixView(std::span<const float> d, std::size_t r, std::size_t c)
      : data(d), rows(r), cols(c) {
    if (d.size() != r * c) throw ValidationError("matrix view size mismatch");
  }

  std::span<const float> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

inline MatrixView frame_view(const TokenTensor& tokens, std::size_t b, std::size_t t) {
  const std::size_t n = tokens.dim(2);
  const std::size_t c = tokens.dim(3);
  return MatrixView(tokens.values().subspan(tokens.offset(b, t, 0, 0), n * c), n, c);
}

inline FrameShape frame_shape(const TokenTensor& tokens) {
  return {tokens.dim(0), tokens.dim(1), tokens.dim(2)};
}

// Throws ValidationError naming `what` if any value is NaN or infinite.
void require_finite(std::span<const float> values, const std::string& what);

}  // namespace stmask
