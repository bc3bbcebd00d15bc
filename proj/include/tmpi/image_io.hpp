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

#include <cstddef>
#include <filesystem>
#include <stdexcept>

#include "tmpi/core.hpp"

namespace tmpi {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) or binary PGM/PPM.
// Values are normalized to [0,1].
Image load_image(const std::filesystem::path& path);

struct DepthLoadResult {
  DepthMap depth;
  // Pixels that were zero, negative or non-finite and got the nearest valid value.
  std::size_t repaired = 0;
};

// Single-channel PFM (floats), or 8/16-bit PNG / PGM holding integer codes.
// Raw values are multiplied by `scale`.
DepthLoadResult load_depth(const std::filesystem::path& path, double scale = 1.0);

// Replaces invalid depths (<= 0, NaN, inf) with the value of the nearest valid
// pixel (breadth-first over 4-neighbors). Throws if nothing is valid.
DepthLoadResult repair_depth(Raster raw);

// 8- or 16-bit PNG with 1, 3 or 4 channels.
void save_png(const Image& image, const std::filesystem::path& path, int bit_depth = 8);

// Single-channel little-endian PFM.
void save_pfm(const Raster& raster, const std::filesystem::path& path);

}  // namespace tmpi
