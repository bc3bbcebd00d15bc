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

#include "tmpi/tiling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tmpi {

namespace {

std::vector<int> axis_origins(int size, int tile_size, int stride) {
  std::vector<int> out;
  const int last = size - tile_size;
  for (int x = 0; x < last; x += stride) out.push_back(x);
  out.push_back(last);
  return out;
}

// Linear ramp across the overlap band on both ends of one axis.
std::vector<float> axis_ramp(int tile_size, int stride) {
  std::vector<float> w(tile_size, 1.0f);
  const int band = tile_size - stride;
  if (band <= 0) return w;
  for (int i = 0; i < tile_size; ++i) {
    const int from_edge = std::min(i, tile_size - 1 - i);
    if (from_edge < band) {
      const float t = static_cast<float>(from_edge + 1) / static_cast<float>(band + 1);
      w[i] = kBlendFloor + (1.0f - kBlendFloor) * t;
    }
  }
  return w;
}

}  // namespace

TileOrigin TileGrid::origin(std::size_t index) const {
  if (index >= tile_count()) throw std::out_of_range("tile index out of range");
  const std::size_t cols = xs_.size();
  return {xs_[index % cols], ys_[index / cols]};
}

std::vector<TileOrigin> TileGrid::origins() const {
  std::vector<TileOrigin> out;
  out.reserve(tile_count());
  for (int y : ys_) {
    for (int x : xs_) out.push_back({x, y});
  }
  return out;
}

int default_stride(int tile_size) { return tile_size - tile_size / 8; }

TileGrid make_grid(int width, int height, int tile_size, int stride) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image size must be positive");
  if (tile_size < 1 || tile_size > std::min(width, height)) {
    throw std::invalid_argument("tile size " + std::to_string(tile_size) +
                                " exceeds image dimensions " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  if (stride < 1 || stride > tile_size) {
    throw std::invalid_argument("stride must be in [1, tile size], got " +
                                std::to_string(stride));
  }
  TileGrid grid;
  grid.tile_size_ = tile_size;
  grid.stride_ = stride;
  grid.image_width_ = width;
  grid.image_height_ = height;
  grid.xs_ = axis_origins(width, tile_size, stride);
  grid.ys_ = axis_origins(height, tile_size, stride);
  return grid;
}

TileStack unfold(const Raster& raster, const TileGrid& grid) {
  if (raster.width() != grid.image_width() || raster.height() != grid.image_height()) {
    throw std::invalid_argument("raster " + std::to_string(raster.width()) + "x" +
                                std::to_string(raster.height()) + " does not match grid " +
                                std::to_string(grid.image_width()) + "x" +
                                std::to_string(grid.image_height()));
  }
  TileStack stack{grid, {}};
  stack.tiles.reserve(grid.tile_count());
  const int h = grid.tile_size();
  for (const TileOrigin& o : grid.origins()) stack.tiles.push_back(raster.crop(o.x, o.y, h, h));
  return stack;
}

BlendWeights default_blend_weights(int tile_size, int stride) {
  if (tile_size < 1 || stride < 1 || stride > tile_size) {
    throw std::invalid_argument("blend weights need 1 <= stride <= tile size");
  }
  const std::vector<float> ramp = axis_ramp(tile_size, stride);
  BlendWeights bw{tile_size, stride, Raster(tile_size, tile_size, 1)};
  for (int y = 0; y < tile_size; ++y) {
    for (int x = 0; x < tile_size; ++x) bw.weights.at(x, y) = ramp[x] * ramp[y];
  }
  return bw;
}

Raster fold(const TileStack& stack, const BlendWeights& weights) {
  const TileGrid& grid = stack.grid;
  const int h = grid.tile_size();
  if (stack.tiles.size() != grid.tile_count()) {
    throw std::invalid_argument("tile stack size does not match its grid");
  }
  if (weights.weights.width() != h || weights.weights.height() != h) {
    throw std::invalid_argument("blend weights do not match tile size");
  }
  if (stack.tiles.empty()) throw std::invalid_argument("empty tile stack");
  const int channels = stack.tiles.front().channels();

  const int width = grid.image_width();
  const int height = grid.image_height();
  std::vector<double> acc(static_cast<std::size_t>(width) * height * channels, 0.0);
  std::vector<double> wsum(static_cast<std::size_t>(width) * height, 0.0);

  // Fixed tile order keeps the floating-point sums reproducible.
  for (std::size_t i = 0; i < stack.tiles.size(); ++i) {
    const Raster& tile = stack.tiles[i];
    if (tile.width() != h || tile.height() != h || tile.channels() != channels) {
      throw std::invalid_argument("tile " + std::to_string(i) + " has inconsistent shape");
    }
    const TileOrigin o = grid.origin(i);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < h; ++x) {
        const double w = weights.weights.at(x, y);
        const std::size_t p = static_cast<std::size_t>(o.y + y) * width + (o.x + x);
        wsum[p] += w;
        for (int c = 0; c < channels; ++c) acc[p * channels + c] += w * tile.at(x, y, c);
      }
    }
  }

  Raster out(width, height, channels);
  auto data = out.data();
  for (std::size_t p = 0; p < wsum.size(); ++p) {
    for (int c = 0; c < channels; ++c) {
      data[p * channels + c] = static_cast<float>(acc[p * channels + c] / wsum[p]);
    }
  }
  return out;
}

}  // namespace tmpi
