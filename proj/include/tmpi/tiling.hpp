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

#include <vector>

#include "tmpi/core.hpp"

namespace tmpi {

struct TileOrigin {
  int x = 0;
  int y = 0;
  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

// Regular grid of square h×h tiles. Column/row origins advance by the stride
// and the last one is clamped to (size - h) so every tile lies inside the frame.
class TileGrid {
 public:
  TileGrid() = default;

  int tile_size() const { return tile_size_; }
  int stride() const { return stride_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  const std::vector<int>& column_origins() const { return xs_; }
  const std::vector<int>& row_origins() const { return ys_; }
  int columns() const { return static_cast<int>(xs_.size()); }
  int rows() const { return static_cast<int>(ys_.size()); }
  std::size_t tile_count() const { return xs_.size() * ys_.size(); }

  // Row-major: index = row * columns + column.
  TileOrigin origin(std::size_t index) const;
  std::vector<TileOrigin> origins() const;

  friend bool operator==(const TileGrid&, const TileGrid&) = default;

 private:
  friend TileGrid make_grid(int width, int height, int tile_size, int stride);
  int tile_size_ = 0;
  int stride_ = 0;
  int image_width_ = 0;
  int image_height_ = 0;
  std::vector<int> xs_;
  std::vector<int> ys_;
};

TileGrid make_grid(int width, int height, int tile_size, int stride);

// Stride used throughout: h - h/8.
int default_stride(int tile_size);

struct TileStack {
  TileGrid grid;
  std::vector<Raster> tiles;
};

// Bit-exact h×h crops at every grid origin.
TileStack unfold(const Raster& raster, const TileGrid& grid);

// Per-tile blend weights for overlap regions (h×h, single channel, all > 0).
struct BlendWeights {
  int tile_size = 0;
  int stride = 0;
  Raster weights;
};

inline constexpr float kBlendFloor = 1e-3f;

BlendWeights default_blend_weights(int tile_size, int stride);

// Weighted average of all tiles covering each pixel.
Raster fold(const TileStack& stack, const BlendWeights& weights);

}  // namespace tmpi
