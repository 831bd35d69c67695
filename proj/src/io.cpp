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

#include "stmask/io.hpp"

#include <unistd.h>

#include <atomic>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <type_traits>

namespace stmask {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return v;
}

template <typename T>
constexpr std::size_t payload_width() {
  return std::is_same_v<T, std::uint8_t> ? 1 : 4;
}

template <typename T>
void put_value(std::string& out, T v) {
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    out.push_back(static_cast<char>(v));
  } else {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
}

template <typename T>
T get_value(std::string_view bytes, std::size_t at) {
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    return static_cast<std::uint8_t>(bytes[at]);
  } else {
    return std::bit_cast<float>(get_u32(bytes, at));
  }
}

// Content checks shared by load and save.
template <typename TensorT>
void validate_contents(const TensorT& value, std::string_view magic, const std::string& where) {
  const auto vals = value.values();
  if constexpr (std::is_same_v<typename TensorT::value_type, std::uint8_t>) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] > 1) {
        throw ValidationError(where + ": mask entry " + std::to_string(i) + " is not 0 or 1");
      }
    }
  } else {
    require_finite(vals, where);
    if (magic == "VDEN") {
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0.0f) {
          throw ValidationError(where + ": negative density at flat index " + std::to_string(i));
        }
      }
    } else if (magic == "VREL") {
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < -1.0f || vals[i] > 1.0f) {
          throw ValidationError(where + ": relevance outside [-1, 1] at flat index " +
                                std::to_string(i));
        }
      }
    }
  }
}

template <typename TensorT>
std::string encode(const TensorT& value, std::string_view magic) {
  using T = typename TensorT::value_type;
  if (value.empty()) throw ValidationError("refusing to save an empty tensor");
  validate_contents(value, magic, std::string(magic) + " tensor");
  std::string out;
  out.reserve(12 + 4 * TensorT::kRank + value.size() * payload_width<T>());
  out.append(magic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(TensorT::kRank));
  for (std::size_t d : value.shape()) {
    if (d == 0 || d > 0xffffffffu) throw ValidationError("tensor dim does not fit in u32");
    put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (T v : value.values()) put_value(out, v);
  return out;
}

template <typename TensorT>
TensorT decode(std::string_view bytes, std::string_view magic, const std::string& where) {
  using T = typename TensorT::value_type;
  constexpr std::size_t rank = TensorT::kRank;
  if (bytes.size() < 4 || bytes.substr(0, 4) != magic) {
    throw FormatError(where + ": bad magic, expected " + std::string(magic));
  }
  if (bytes.size() < 12) throw TruncationError(where + ": header truncated");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kFormatVersion) {
    throw FormatError(where + ": unsupported format version " + std::to_string(version));
  }
  const std::uint32_t file_rank = get_u32(bytes, 8);
  if (file_rank != rank) {
    throw FormatError(where + ": rank " + std::to_string(file_rank) + ", expected " +
                      std::to_string(rank));
  }
  const std::size_t header = 12 + 4 * rank;
  if (bytes.size() < header) throw TruncationError(where + ": dims truncated");
  typename TensorT::Shape shape{};
  for (std::size_t i = 0; i < rank; ++i) {
    shape[i] = get_u32(bytes, 12 + 4 * i);
    if (shape[i] == 0) throw ValidationError(where + ": zero dim in header");
  }
  const std::size_t count = checked_element_count(shape, payload_width<T>());
  const std::size_t payload = count * payload_width<T>();
  if (bytes.size() - header < payload) {
    throw TruncationError(where + ": payload has " + std::to_string(bytes.size() - header) +
                          " bytes, header requires " + std::to_string(payload));
  }
  if (bytes.size() - header > payload) {
    throw FormatError(where + ": trailing bytes after payload");
  }
  std::vector<T> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = get_value<T>(bytes, header + i * payload_width<T>());
  }
  TensorT out(shape, std::move(data));
  validate_contents(out, magic, where);
  return out;
}

template <typename TensorT>
TensorT load_as(const std::filesystem::path& path, std::string_view magic) {
  const std::string bytes = read_file(path);
  return decode<TensorT>(bytes, magic, path.string());
}

std::atomic<unsigned> g_temp_counter{0};

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(g_temp_counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing: " + std::strerror(errno));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      const std::string reason = std::strerror(errno);
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed for " + path.string() + ": " + reason);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

TokenTensor load_token_tensor(const std::filesystem::path& path) {
  return load_as<TokenTensor>(path, "VTOK");
}
TextFeature load_text_feature(const std::filesystem::path& path) {
  return load_as<TextFeature>(path, "VTXT");
}
MaskTensor load_mask(const std::filesystem::path& path) { return load_as<MaskTensor>(path, "VMSK"); }
DensityTensor load_density(const std::filesystem::path& path) {
  return load_as<DensityTensor>(path, "VDEN");
}
RelevanceTensor load_relevance(const std::filesystem::path& path) {
  return load_as<RelevanceTensor>(path, "VREL");
}

void save_token_tensor(const TokenTensor& value, const std::filesystem::path& path) {
  write_file_atomic(path, encode(value, "VTOK"));
}
void save_text_feature(const TextFeature& value, const std::filesystem::path& path) {
  write_file_atomic(path, encode(value, "VTXT"));
}
void save_mask(const MaskTensor& value, const std::filesystem::path& path) {
  write_file_atomic(path, encode(value, "VMSK"));
}
void save_density(const DensityTensor& value, const std::filesystem::path& path) {
  write_file_atomic(path, encode(value, "VDEN"));
}
void save_relevance(const RelevanceTensor& value, const std::filesystem::path& path) {
  write_file_atomic(path, encode(value, "VREL"));
}

}  // namespace stmask
