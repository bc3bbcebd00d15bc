/*
Copyright 2026 The tmpi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmpi/mpigen.hpp"

namespace tmpi {

// Binary layout, all little-endian:
//
//   "TMPI"            4 bytes
//   version           u16
//   width, height     u32, u32   source image size
//   tile_size, stride u32, u32
//   max_planes        u16
//   tile_count        u32
//   camera            16 × f64   fx fy cx cy, rotation (row-major), translation
//   tile_count records:
//     x, y            u32, u32
//     k               u16
//     depths          k × f32, strictly increasing
//     planes          k × (tile_size² × RGBA u8, row-major, not premultiplied)
inline constexpr char kTmpiMagic[4] = {'T', 'M', 'P', 'I'};
inline constexpr std::uint16_t kTmpiVersion = 1;
inline constexpr std::size_t kTmpiHeaderBytes = 4 + 2 + 4 * 4 + 2 + 4 + 16 * 8;

enum class TmpiErrorCode {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kInvariantViolation,
};

class TmpiFormatError : public std::runtime_error {
 public:
  TmpiFormatError(TmpiErrorCode code, const std::string& message, long tile_index = -1)
      : std::runtime_error(message), code_(code), tile_index_(tile_index) {}

  TmpiErrorCode code() const { return code_; }
  // Index of the tile record being read, or -1 for header-level errors.
  long tile_index() const { return tile_index_; }

 private:
  TmpiErrorCode code_;
  long tile_index_;
};

const char* to_string(TmpiErrorCode code);

// Nearest u8 code for a value in [0,1].
std::uint8_t quantize_unit(float value);

std::vector<std::uint8_t> encode_tmpi(const TiledMpi& tmpi);
TiledMpi decode_tmpi(std::span<const std::uint8_t> bytes);

// Writes through a temporary file and renames it into place.
void write_tmpi(const TiledMpi& tmpi, const std::filesystem::path& path);
TiledMpi read_tmpi(const std::filesystem::path& path);

// Writes `bytes` to `path` via temp-and-rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace tmpi
