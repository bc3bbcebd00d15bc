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

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tmpi/core.hpp"
#include "tmpi/mpigen.hpp"

namespace tmpi {

struct Homography {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    const Eigen::Vector3d q = matrix * p.homogeneous();
    return q.hnormalized();
  }
};

// Maps tile-local pixels of the fronto-parallel plane z = depth (source camera
// frame) to target pixels:
//   H = K_t (R + t n^T / depth) K_s'^-1,  n = (0, 0, 1)
// where K_s' has its principal point shifted by the tile origin and (R, t) is
// the source-to-target pose. Throws std::domain_error when H is singular.
Homography plane_homography(const Camera& source, const Camera& target, TileOrigin tile_origin,
                            double depth);

// Axis-aligned window of a warped plane; rgba is width×height×4.
struct WarpedRegion {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  Raster rgba;
  bool empty() const { return width == 0 || height == 0; }
};

// Inverse-warps a plane into the footprint of its four warped corners with
// bilinear sampling. Samples outside the plane's domain are transparent black.
WarpedRegion warp_plane_region(const RgbaPlane& plane, const Homography& homography,
                               int out_width, int out_height);

// Full-frame version of warp_plane_region (out_width × out_height × 4).
Raster warp_plane(const RgbaPlane& plane, const Homography& homography, int out_width,
                  int out_height);

using Color3 = std::array<float, 3>;

// Back-to-front over: out = a * c + (1 - a) * out, starting from the background.
Image composite_over(const std::vector<Raster>& back_to_front_rgba, const Color3& background);

struct CompositeEntry {
  std::size_t tile = 0;
  std::size_t plane = 0;
  float depth = 0.0f;
};

// Every (tile, plane) pair, far to near; equal depths fall back to tile then
// plane index.
std::vector<CompositeEntry> composite_order(const TiledMpi& tmpi);

struct RenderTask {
  const TiledMpi* tmpi = nullptr;
  Camera target;
  int width = 0;
  int height = 0;
  Color3 background = {0.0f, 0.0f, 0.0f};
  int threads = 0;
};

Image render_tmpi(const RenderTask& task);

// Renders at the TMPI's own resolution.
Image render_tmpi(const TiledMpi& tmpi, const Camera& target, int threads = 0);

// Monolithic MPI renderer: warps every full-frame plane with tile origin (0,0)
// and evaluates the closed-form sum over planes. Planes may be given in any order.
Image render_mpi_reference(const std::vector<RgbaPlane>& planes, const Camera& source,
                           const Camera& target, int out_width, int out_height,
                           const Color3& background = {0.0f, 0.0f, 0.0f});

std::vector<Image> render_path(const TiledMpi& tmpi, const std::vector<Camera>& cameras,
                               int out_width, int out_height, int threads = 0);

}  // namespace tmpi
