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
#include <optional>
#include <vector>

#include "tmpi/core.hpp"
#include "tmpi/placement.hpp"
#include "tmpi/tiling.hpp"

namespace tmpi {

// One fronto-parallel layer of a tile: non-premultiplied RGB plus alpha.
struct RgbaPlane {
  Raster color;  // h×h×3
  Raster alpha;  // h×h×1
  float depth = 1.0f;
};

// A small MPI over one tile. Planes are sorted by increasing depth, so index 0
// is the nearest plane.
struct TileMpi {
  std::vector<RgbaPlane> planes;
  TileOrigin origin;
};

// Grid of per-tile MPIs sharing one source camera.
struct TiledMpi {
  TileGrid grid;
  std::vector<TileMpi> tiles;
  int max_planes = 0;
  Camera source_camera;
};

// Binary alpha from the label map; color copied under the mask, zero elsewhere.
TileMpi peel_layers(const Raster& tile_rgb, const LabelMap& labels, const PlaneSet& planes,
                    TileOrigin origin = {});

struct InpaintResult {
  Raster color;
  // Set when the mask had no valid pixel and the output is flat mid-gray.
  bool no_valid_pixels = false;
};

// Pull-push hole filling over a binomial pyramid. Pixels with mask > 0.5 are kept.
InpaintResult inpaint_pyramid(const Raster& color, const Raster& valid_mask);

// Box-blurs the per-pixel compositing weights of every plane and converts them
// back to over-operator alphas. Radius 0 returns the tile unchanged.
TileMpi soften_alpha(const TileMpi& tile, int radius);

// Per-plane blend of the input with a background layer:
//   W_j = prod_{k > j} (1 - alpha_k),  out_j = W_j * rgb + (1 - W_j) * background_j.
// Inputs are ordered back to front, i.e. larger index occludes smaller.
std::vector<Raster> blend_background(const Raster& tile_rgb, const std::vector<Raster>& alphas,
                                     const std::vector<Raster>& backgrounds);

struct TileMpiOptions {
  int restarts = 4;
  int soften_radius = 1;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
};

TileMpi build_tile_mpi(const Raster& tile_rgb, const Raster& tile_depth, const Raster& tile_conf,
                       int n, const TileMpiOptions& options, TileOrigin origin = {});

enum class ConfidenceMode { kRobust, kUniform };

struct TmpiConfig {
  int tile_size = 64;
  int stride = 0;  // 0 selects h - h/8
  int planes = 4;
  int restarts = 4;
  int soften_radius = 1;
  ConfidenceMode confidence = ConfidenceMode::kRobust;
  int confidence_window = 5;
  double confidence_scale_fraction = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
  KMeansOptions kmeans;
};

// Pinhole camera at the origin looking down +z, focal length equal to the image width.
Camera default_camera(int width, int height);

// Converts 1- or 4-channel images to RGB.
Raster to_rgb(const Image& image);

TiledMpi build_tmpi(const Image& image, const DepthMap& depth, const TmpiConfig& config,
                    const std::optional<Camera>& source_camera = std::nullopt);

// RGBA scalars stored across all tiles.
std::size_t texture_scalars(const TiledMpi& tmpi);
// RGBA scalars of a monolithic MPI with `planes` full-frame layers.
std::size_t monolithic_scalars(int width, int height, int planes);

}  // namespace tmpi
