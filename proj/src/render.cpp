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

#include "tmpi/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "tmpi/parallel.hpp"

namespace tmpi {

namespace {

// Tolerance on the tile domain so round-off at exact tile edges still samples.
constexpr double kDomainEps = 1e-6;
constexpr int kBandRows = 16;

struct Footprint {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive
  bool empty() const { return x1 < x0 || y1 < y0; }
};

Footprint footprint(const Homography& homography, int tile_size, int out_width, int out_height) {
  const double e = tile_size - 1;
  const Eigen::Vector3d corners[4] = {{0, 0, 1}, {e, 0, 1}, {0, e, 1}, {e, e, 1}};
  int in_front = 0;
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& c : corners) {
    const Eigen::Vector3d q = homography.matrix * c;
    if (q.z() <= 0.0) continue;
    ++in_front;
    min_x = std::min(min_x, q.x() / q.z());
    max_x = std::max(max_x, q.x() / q.z());
    min_y = std::min(min_y, q.y() / q.z());
    max_y = std::max(max_y, q.y() / q.z());
  }
  Footprint fp;
  if (in_front == 0) return fp;
  if (in_front < 4) {
    // The plane crosses the target's principal plane; scan the whole frame.
    return {0, 0, out_width - 1, out_height - 1};
  }
  fp.x0 = static_cast<int>(std::max(0.0, std::floor(min_x)));
  fp.y0 = static_cast<int>(std::max(0.0, std::floor(min_y)));
  fp.x1 = static_cast<int>(std::min<double>(out_width - 1, std::ceil(max_x)));
  fp.y1 = static_cast<int>(std::min<double>(out_height - 1, std::ceil(max_y)));
  return fp;
}

// Bilinear RGBA lookup at target pixel (x, y). Returns false outside the plane.
bool sample(const RgbaPlane& plane, const Eigen::Matrix3d& inverse, int x, int y, float* rgba) {
  const Eigen::Vector3d p = inverse * Eigen::Vector3d(x, y, 1.0);
  if (p.z() <= 0.0) return false;
  const int size = plane.alpha.width();
  const double hi = size - 1;
  double u = p.x() / p.z();
  double v = p.y() / p.z();
  if (!(u >= -kDomainEps && v >= -kDomainEps && u <= hi + kDomainEps && v <= hi + kDomainEps)) {
    return false;
  }
  u = std::clamp(u, 0.0, hi);
  v = std::clamp(v, 0.0, hi);
  const int u0 = std::min(static_cast<int>(u), size - 1);
  const int v0 = std::min(static_cast<int>(v), size - 1);
  const int u1 = std::min(u0 + 1, size - 1);
  const int v1 = std::min(v0 + 1, size - 1);
  const double au = u - u0;
  const double av = v - v0;
  const double w00 = (1 - au) * (1 - av), w10 = au * (1 - av);
  const double w01 = (1 - au) * av, w11 = au * av;
  for (int c = 0; c < 3; ++c) {
    rgba[c] = static_cast<float>(w00 * plane.color.at(u0, v0, c) + w10 * plane.color.at(u1, v0, c) +
                                 w01 * plane.color.at(u0, v1, c) + w11 * plane.color.at(u1, v1, c));
  }
  rgba[3] = static_cast<float>(w00 * plane.alpha.at(u0, v0) + w10 * plane.alpha.at(u1, v0) +
                               w01 * plane.alpha.at(u0, v1) + w11 * plane.alpha.at(u1, v1));
  return true;
}

Eigen::Matrix3d checked_inverse(const Homography& homography) {
  Eigen::Matrix3d inverse;
  bool invertible = false;
  homography.matrix.computeInverseWithCheck(inverse, invertible, 1e-12);
  if (!invertible) throw std::domain_error("homography is not invertible");
  return inverse;
}

void check_plane(const RgbaPlane& plane) {
  const int h = plane.alpha.width();
  if (h <= 0 || plane.alpha.height() != h || plane.alpha.channels() != 1 ||
      plane.color.width() != h || plane.color.height() != h || plane.color.channels() != 3) {
    throw std::invalid_argument("plane must hold an h×h RGB color and h×h alpha");
  }
}

Image to_image(const std::vector<double>& fb, int width, int height) {
  Raster out(width, height, 3);
  auto data = out.data();
  for (std::size_t i = 0; i < fb.size(); ++i) {
    data[i] = static_cast<float>(std::clamp(fb[i], 0.0, 1.0));
  }
  return Image(std::move(out));
}

}  // namespace

Homography plane_homography(const Camera& source, const Camera& target, TileOrigin tile_origin,
                            double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw std::invalid_argument("plane depth must be positive");
  }
  const Camera shifted = shift_principal_point(source, tile_origin.x, tile_origin.y);
  Eigen::Matrix3d k_inv;
  k_inv << 1.0 / shifted.fx(), 0.0, -shifted.cx() / shifted.fx(),  //
      0.0, 1.0 / shifted.fy(), -shifted.cy() / shifted.fy(),         //
      0.0, 0.0, 1.0;
  const Pose pose = relative_pose(source, target);
  const Eigen::Vector3d normal(0.0, 0.0, 1.0);
  const Eigen::Matrix3d plane_map = pose.rotation + pose.translation * normal.transpose() / depth;
  Homography h{intrinsics_matrix(target) * plane_map * k_inv};
  if (!(std::abs(h.matrix.determinant()) > 1e-12)) {
    throw std::domain_error("degenerate plane homography (target camera lies on the plane)");
  }
  return h;
}

WarpedRegion warp_plane_region(const RgbaPlane& plane, const Homography& homography,
                               int out_width, int out_height) {
  check_plane(plane);
  if (out_width <= 0 || out_height <= 0) throw std::invalid_argument("output size must be positive");
  const Footprint fp = footprint(homography, plane.alpha.width(), out_width, out_height);
  WarpedRegion region;
  if (fp.empty()) return region;
  const Eigen::Matrix3d inverse = checked_inverse(homography);
  region.x0 = fp.x0;
  region.y0 = fp.y0;
  region.width = fp.x1 - fp.x0 + 1;
  region.height = fp.y1 - fp.y0 + 1;
  region.rgba = Raster(region.width, region.height, 4);
  for (int y = fp.y0; y <= fp.y1; ++y) {
    for (int x = fp.x0; x <= fp.x1; ++x) {
      sample(plane, inverse, x, y, &region.rgba.at(x - fp.x0, y - fp.y0, 0));
    }
  }
  return region;
}

Raster warp_plane(const RgbaPlane& plane, const Homography& homography, int out_width,
                  int out_height) {
  const WarpedRegion region = warp_plane_region(plane, homography, out_width, out_height);
  Raster out(out_width, out_height, 4);
  for (int y = 0; y < region.height; ++y) {
    for (int x = 0; x < region.width; ++x) {
      for (int c = 0; c < 4; ++c) out.at(region.x0 + x, region.y0 + y, c) = region.rgba.at(x, y, c);
    }
  }
  return out;
}

Image composite_over(const std::vector<Raster>& back_to_front_rgba, const Color3& background) {
  if (back_to_front_rgba.empty()) throw std::invalid_argument("nothing to composite");
  const int width = back_to_front_rgba.front().width();
  const int height = back_to_front_rgba.front().height();
  std::vector<double> fb(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t p = 0; p < fb.size() / 3; ++p) {
    for (int c = 0; c < 3; ++c) fb[p * 3 + c] = background[c];
  }
  for (const Raster& layer : back_to_front_rgba) {
    if (layer.width() != width || layer.height() != height || layer.channels() != 4) {
      throw std::invalid_argument("composite layers must share size and be RGBA");
    }
    const auto data = layer.data();
    for (std::size_t p = 0; p < fb.size() / 3; ++p) {
      const double a = data[p * 4 + 3];
      for (int c = 0; c < 3; ++c) fb[p * 3 + c] = a * data[p * 4 + c] + (1.0 - a) * fb[p * 3 + c];
    }
  }
  return to_image(fb, width, height);
}

std::vector<CompositeEntry> composite_order(const TiledMpi& tmpi) {
  std::vector<CompositeEntry> order;
  for (std::size_t t = 0; t < tmpi.tiles.size(); ++t) {
    for (std::size_t j = 0; j < tmpi.tiles[t].planes.size(); ++j) {
      order.push_back({t, j, tmpi.tiles[t].planes[j].depth});
    }
  }
  std::sort(order.begin(), order.end(), [](const CompositeEntry& a, const CompositeEntry& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    if (a.tile != b.tile) return a.tile < b.tile;
    return a.plane < b.plane;
  });
  return order;
}

Image render_tmpi(const RenderTask& task) {
  if (task.tmpi == nullptr) throw std::invalid_argument("render task has no TMPI");
  if (task.width <= 0 || task.height <= 0) throw std::invalid_argument("output size must be positive");
  const TiledMpi& tmpi = *task.tmpi;
  const std::vector<CompositeEntry> order = composite_order(tmpi);

  struct Prepared {
    const RgbaPlane* plane;
    Eigen::Matrix3d inverse;
    Footprint fp;
  };
  std::vector<Prepared> prepared(order.size());
  parallel_for(order.size(), task.threads, [&](std::size_t i) {
    const TileMpi& tile = tmpi.tiles[order[i].tile];
    const RgbaPlane& plane = tile.planes[order[i].plane];
    check_plane(plane);
    const Homography h = plane_homography(tmpi.source_camera, task.target, tile.origin, plane.depth);
    Prepared p{&plane, Eigen::Matrix3d::Identity(),
               footprint(h, plane.alpha.width(), task.width, task.height)};
    if (!p.fp.empty()) p.inverse = checked_inverse(h);
    prepared[i] = p;
  });

  // Row bands are independent; inside a band entries are applied in the fixed
  // far-to-near order, so every pixel sees the same sequence for any thread count.
  std::vector<double> fb(static_cast<std::size_t>(task.width) * task.height * 3);
  const std::size_t bands = static_cast<std::size_t>((task.height + kBandRows - 1) / kBandRows);
  parallel_for(bands, task.threads, [&](std::size_t band) {
    const int row0 = static_cast<int>(band) * kBandRows;
    const int row1 = std::min(task.height, row0 + kBandRows) - 1;
    for (int y = row0; y <= row1; ++y) {
      for (int x = 0; x < task.width; ++x) {
        for (int c = 0; c < 3; ++c) {
          fb[(static_cast<std::size_t>(y) * task.width + x) * 3 + c] = task.background[c];
        }
      }
    }
    float rgba[4];
    for (const Prepared& p : prepared) {
      if (p.fp.empty()) continue;
      const int y0 = std::max(row0, p.fp.y0);
      const int y1 = std::min(row1, p.fp.y1);
      for (int y = y0; y <= y1; ++y) {
        for (int x = p.fp.x0; x <= p.fp.x1; ++x) {
          if (!sample(*p.plane, p.inverse, x, y, rgba)) continue;
          const double a = rgba[3];
          if (a <= 0.0) continue;
          double* px = &fb[(static_cast<std::size_t>(y) * task.width + x) * 3];
          for (int c = 0; c < 3; ++c) px[c] = a * rgba[c] + (1.0 - a) * px[c];
        }
      }
    }
  });
  return to_image(fb, task.width, task.height);
}

Image render_tmpi(const TiledMpi& tmpi, const Camera& target, int threads) {
  RenderTask task{&tmpi, target, tmpi.grid.image_width(), tmpi.grid.image_height()};
  task.threads = threads;
  return render_tmpi(task);
}

Image render_mpi_reference(const std::vector<RgbaPlane>& planes, const Camera& source,
                           const Camera& target, int out_width, int out_height,
                           const Color3& background) {
  if (planes.empty()) throw std::invalid_argument("reference render needs at least one plane");
  std::vector<const RgbaPlane*> sorted;
  for (const auto& p : planes) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RgbaPlane* a, const RgbaPlane* b) { return a->depth > b->depth; });

  // warped[i] is the i-th plane counted from the back.
  std::vector<Raster> warped;
  warped.reserve(sorted.size());
  for (const RgbaPlane* p : sorted) {
    warped.push_back(warp_plane(*p, plane_homography(source, target, {0, 0}, p->depth),
                                out_width, out_height));
  }

  const std::size_t n = warped.size();
  std::vector<double> fb(static_cast<std::size_t>(out_width) * out_height * 3, 0.0);
  for (std::size_t p = 0; p < fb.size() / 3; ++p) {
    // sum_i a_i c_i prod_{j > i} (1 - a_j)  +  background * prod_j (1 - a_j)
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = warped[i].data();
      double transmittance = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) transmittance *= 1.0 - warped[j].data()[p * 4 + 3];
      for (int c = 0; c < 3; ++c) fb[p * 3 + c] += d[p * 4 + 3] * d[p * 4 + c] * transmittance;
    }
    double all = 1.0;
    for (std::size_t j = 0; j < n; ++j) all *= 1.0 - warped[j].data()[p * 4 + 3];
    for (int c = 0; c < 3; ++c) fb[p * 3 + c] += background[c] * all;
  }
  return to_image(fb, out_width, out_height);
}

std::vector<Image> render_path(const TiledMpi& tmpi, const std::vector<Camera>& cameras,
                               int out_width, int out_height, int threads) {
  if (cameras.empty()) throw std::invalid_argument("camera path is empty");
  std::vector<Image> frames;
  frames.reserve(cameras.size());
  for (const Camera& cam : cameras) {
    RenderTask task{&tmpi, cam, out_width, out_height};
    task.threads = threads;
    frames.push_back(render_tmpi(task));
  }
  return frames;
}

}  // namespace tmpi
