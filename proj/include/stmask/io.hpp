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

// Binary tensor files.
//
// Layout, little-endian throughout:
//   [0, 4)   ASCII magic: VTOK, VMSK, VDEN, VREL or VTXT
//   [4, 8)   u32 format version (1)
//   [8, 12)  u32 rank (4, 3, 3, 3, 2 respectively)
//   rank x u32 dims, outermost first
//   payload: row-major f32 values, or one u8 per entry for VMSK.
//
// Writers validate first and then write to a temporary sibling that is
// renamed over the destination, so a failed save never leaves a partial file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "stmask/tensor.hpp"

namespace stmask {

inline constexpr std::uint32_t kFormatVersion = 1;

TokenTensor load_token_tensor(const std::filesystem::path& path);
TextFeature load_text_feature(const std::filesystem::path& path);
MaskTensor load_mask(const std::filesystem::path& path);
DensityTensor load_density(const std::filesystem::path& path);
RelevanceTensor load_relevance(const std::filesystem::path& path);

void save_token_tensor(const TokenTensor& value, const std::filesystem::path& path);
void save_text_feature(const TextFeature& value, const std::filesystem::path& path);
void save_mask(const MaskTensor& value, const std::filesystem::path& path);
void save_density(const DensityTensor& value, const std::filesystem::path& path);
void save_relevance(const RelevanceTensor& value, const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temporary file and an atomic rename.
/// Throws IoError with the path and OS error text on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Reads a whole file. Throws IoError on failure.
std::string read_file(const std::filesystem::path& path);

}  // namespace stmask
