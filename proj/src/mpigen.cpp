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

#include "tmpi/mpigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tmpi/parallel.hpp"

namespace tmpi {

namespace {

constexpr std::array<double, 5> kBinomial = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

// One pyramid level: normalized color, coverage weight in [0,1].
struct Level {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> color;   // normalized where weight > 0
  std::vector<double> weight;
};

Level downsample(const Level& fine) {
  Level coarse;
  coarse.width = (fine.width + 1) / 2;
  coarse.height = (fine.height + 1) / 2;
  coarse.channels = fine.channels;
  const int ch = fine.channels;
  coarse.color.assign(static_cast<std::size_t>(coarse.width) * coarse.height * ch, 0.0);
  coarse.weight.assign(static_cast<std::size_t>(coarse.width) * coarse.height, 0.0);
  std::vector<double> premult(ch);
  for (int y = 0; y < coarse.height; ++y) {
    for (int x = 0; x < coarse.width; ++x) {
      double kernel_sum = 0.0;
      double wsum = 0.0;
      std::fill(premult.begin(), premult.end(), 0.0);
      for (int j = -2; j <= 2; ++j) {
        const int fy = 2 * y + j;
        if (fy < 0 || fy >= fine.height) continue;
        for (int i = -2; i <= 2; ++i) {
          const int fx = 2 * x + i;
          if (fx < 0 || fx >= fine.width) continue;
          const double k = kBinomial[i + 2] * kBinomial[j + 2];
          const std::size_t p = static_cast<std::size_t>(fy) * fine.width + fx;
          kernel_sum += k;
          const double w = k * fine.weight[p];
          wsum += w;
          for (int c = 0; c < ch; ++c) premult[c] += w * fine.color[p * ch + c];
        }
      }
      const std::size_t q = static_cast<std::size_t>(y) * coarse.width + x;
      coarse.weight[q] = wsum / kernel_sum;
      if (wsum > 0.0) {
        for (int c = 0; c < ch; ++c) coarse.color[q * ch + c] = premult[c] / wsum;
      }
    }
  }
  return coarse;
}

// Bilinear lookup in a fully defined level at fine-level coordinates (x/2, y/2).
void sample_coarse(const Level& coarse, double cxf, double cyf, double* out) {
  cxf = std::clamp(cxf, 0.0, static_cast<double>(coarse.width - 1));
  cyf = std::clamp(cyf, 0.0, static_cast<double>(coarse.height - 1));
  const int x0 = static_cast<int>(cxf);
  const int y0 = static_cast<int>(cyf);
  const int x1 = std::min(x0 + 1, coarse.width - 1);
  const int y1 = std::min(y0 + 1, coarse.height - 1);
  const double ax = cxf - x0;
  const double ay = cyf - y0;
  const int ch = coarse.channels;
  auto at = [&](int x, int y, int c) {
    return coarse.color[(static_cast<std::size_t>(y) * coarse.width + x) * ch + c];
  };
  for (int c = 0; c < ch; ++c) {
    out[c] = (1 - ay) * ((1 - ax) * at(x0, y0, c) + ax * at(x1, y0, c)) +
             ay * ((1 - ax) * at(x0, y1, c) + ax * at(x1, y1, c));
  }
}

// Fills partially covered pixels of `fine` from the (complete) coarse level.
void push(Level& fine, const Level& coarse) {
  const int ch = fine.channels;
  std::vector<double> up(ch);
  for (int y = 0; y < fine.height; ++y) {
    for (int x = 0; x < fine.width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * fine.width + x;
      const double w = fine.weight[p];
      if (w >= 1.0) continue;
      sample_coarse(coarse, 0.5 * x, 0.5 * y, up.data());
      for (int c = 0; c < ch; ++c) {
        double& v = fine.color[p * ch + c];
        v = w > 0.0 ? w * v + (1.0 - w) * up[c] : up[c];
      }
    }
  }
}

}  // namespace

TileMpi peel_layers(const Raster& tile_rgb, const LabelMap& labels, const PlaneSet& planes,
                    TileOrigin origin) {
  if (tile_rgb.channels() != 3) throw std::invalid_argument("peel_layers expects RGB tiles");
  if (labels.width != tile_rgb.width() || labels.height != tile_rgb.height()) {
    throw std::invalid_argument("label map does not match tile");
  }
  const int w = tile_rgb.width();
  const int h = tile_rgb.height();
  TileMpi tile;
  tile.origin = origin;
  for (double d : planes.depths) {
    tile.planes.push_back({Raster(w, h, 3), Raster(w, h, 1), static_cast<float>(d)});
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels.at(x, y);
      if (l < 0 || l >= static_cast<int>(planes.size())) {
        throw std::invalid_argument("label " + std::to_string(l) + " outside plane set");
      }
      RgbaPlane& plane = tile.planes[l];
      plane.alpha.at(x, y) = 1.0f;
      for (int c = 0; c < 3; ++c) plane.color.at(x, y, c) = tile_rgb.at(x, y, c);
    }
  }
  return tile;
}

InpaintResult inpaint_pyramid(const Raster& color, const Raster& valid_mask) {
  if (valid_mask.channels() != 1 || valid_mask.width() != color.width() ||
      valid_mask.height() != color.height()) {
    throw std::invalid_argument("inpaint mask must be single-channel and match the color raster");
  }
  const int ch = color.channels();
  std::vector<Level> pyramid(1);
  Level& base = pyramid[0];
  base.width = color.width();
  base.height = color.height();
  base.channels = ch;
  base.color.assign(color.data().begin(), color.data().end());
  base.weight.resize(static_cast<std::size_t>(base.width) * base.height);
  bool any_valid = false;
  bool all_valid = true;
  for (std::size_t p = 0; p < base.weight.size(); ++p) {
    const bool valid = valid_mask.data()[p] > 0.5f;
    base.weight[p] = valid ? 1.0 : 0.0;
    any_valid = any_valid || valid;
    all_valid = all_valid && valid;
  }
  if (!any_valid) return {Raster(color.width(), color.height(), ch, 0.5f), true};
  if (all_valid) return {color, false};

  while (pyramid.back().width > 1 || pyramid.back().height > 1) {
    pyramid.push_back(downsample(pyramid.back()));
  }
  for (std::size_t level = pyramid.size() - 1; level > 0; --level) {
    push(pyramid[level - 1], pyramid[level]);
  }

  const Level& filled = pyramid[0];
  Raster out = color;
  auto data = out.data();
  for (std::size_t p = 0; p < filled.weight.size(); ++p) {
    if (filled.weight[p] >= 1.0) continue;
    for (int c = 0; c < ch; ++c) {
      data[p * ch + c] = static_cast<float>(std::clamp(filled.color[p * ch + c], 0.0, 1.0));
    }
  }
  return {std::move(out), false};
}

TileMpi soften_alpha(const TileMpi& tile, int radius) {
  if (radius < 0) throw std::invalid_argument("soften radius must be non-negative");
  if (radius == 0 || tile.planes.empty()) return tile;
  const int w = tile.planes.front().alpha.width();
  const int h = tile.planes.front().alpha.height();
  const std::size_t n = tile.planes.size();
  const std::size_t pixels = static_cast<std::size_t>(w) * h;

  // Compositing weight of every plane (front to back) plus leftover transmittance.
  std::vector<std::vector<double>> coverage(n + 1, std::vector<double>(pixels));
  for (std::size_t p = 0; p < pixels; ++p) {
    double transmittance = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = tile.planes[j].alpha.data()[p];
      coverage[j][p] = a * transmittance;
      transmittance *= 1.0 - a;
    }
    coverage[n][p] = transmittance;
  }

  // Separable box blur with the window clamped at the tile border.
  std::vector<double> tmp(pixels);
  for (auto& layer : coverage) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        const int x0 = std::max(0, x - radius);
        const int x1 = std::min(w - 1, x + radius);
        for (int xx = x0; xx <= x1; ++xx) s += layer[static_cast<std::size_t>(y) * w + xx];
        tmp[static_cast<std::size_t>(y) * w + x] = s / (x1 - x0 + 1);
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(h - 1, y + radius);
        for (int yy = y0; yy <= y1; ++yy) s += tmp[static_cast<std::size_t>(yy) * w + x];
        layer[static_cast<std::size_t>(y) * w + x] = s / (y1 - y0 + 1);
      }
    }
  }

  TileMpi out = tile;
  for (std::size_t p = 0; p < pixels; ++p) {
    double total = 0.0;
    for (const auto& layer : coverage) total += layer[p];
    double remaining = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double weight = coverage[j][p] / total;
      double a = 0.0;
      if (remaining > 1e-12) a = std::clamp(weight / remaining, 0.0, 1.0);
      out.planes[j].alpha.data()[p] = static_cast<float>(a);
      remaining -= weight;
    }
  }
  return out;
}

std::vector<Raster> blend_background(const Raster& tile_rgb, const std::vector<Raster>& alphas,
                                     const std::vector<Raster>& backgrounds) {
  if (alphas.size() != backgrounds.size()) {
    throw std::invalid_argument("need one background per alpha layer");
  }
  const int w = tile_rgb.width();
  const int h = tile_rgb.height();
  const int ch = tile_rgb.channels();
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (alphas[j].width() != w || alphas[j].height() != h || alphas[j].channels() != 1 ||
        !backgrounds[j].same_shape(tile_rgb)) {
      throw std::invalid_argument("layer " + std::to_string(j) + " does not match the tile");
    }
  }
  const std::size_t n = alphas.size();
  std::vector<Raster> out(n, Raster(w, h, ch));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Walk front to back so W_j accumulates the layers in front of j.
      float transmittance = 1.0f;
      for (std::size_t jj = n; jj-- > 0;) {
        for (int c = 0; c < ch; ++c) {
          out[jj].at(x, y, c) = transmittance * tile_rgb.at(x, y, c) +
                                (1.0f - transmittance) * backgrounds[jj].at(x, y, c);
        }
        transmittance *= 1.0f - alphas[jj].at(x, y);
      }
    }
  }
  return out;
}

TileMpi build_tile_mpi(const Raster& tile_rgb, const Raster& tile_depth, const Raster& tile_conf,
                       int n, const TileMpiOptions& options, TileOrigin origin) {
  if (tile_rgb.channels() != 3 || tile_depth.channels() != 1 ||
      tile_depth.width() != tile_rgb.width() || tile_depth.height() != tile_rgb.height() ||
      !tile_conf.same_shape(tile_depth)) {
    throw std::invalid_argument("tile rasters are inconsistent");
  }

  double total_conf = 0.0;
  for (float v : tile_conf.data()) total_conf += v;
  const Raster uniform(tile_depth.width(), tile_depth.height(), 1, 1.0f);
  ClusterResult clusters = place_planes(tile_depth, total_conf > 0.0 ? tile_conf : uniform, n,
                                        options.restarts, options.seed, options.kmeans);

  // Planes are stored in single precision; merge centers that collapse there.
  PlaneSet planes;
  std::vector<int> remap(clusters.planes.size());
  for (std::size_t k = 0; k < clusters.planes.size(); ++k) {
    const double d = static_cast<float>(clusters.planes.depths[k]);
    if (planes.depths.empty() || d > planes.depths.back()) planes.depths.push_back(d);
    remap[k] = static_cast<int>(planes.depths.size()) - 1;
  }
  for (int& l : clusters.labels.labels) l = remap[l];

  TileMpi tile = peel_layers(tile_rgb, clusters.labels, planes, origin);

  std::vector<Raster> alphas;
  std::vector<Raster> backgrounds;
  for (auto it = tile.planes.rbegin(); it != tile.planes.rend(); ++it) {
    alphas.push_back(it->alpha);
    backgrounds.push_back(inpaint_pyramid(it->color, it->alpha).color);
  }
  std::vector<Raster> colors = blend_background(tile_rgb, alphas, backgrounds);
  const std::size_t count = tile.planes.size();
  for (std::size_t j = 0; j < count; ++j) tile.planes[j].color = std::move(colors[count - 1 - j]);

  return soften_alpha(tile, options.soften_radius);
}

Camera default_camera(int width, int height) {
  return Camera(width, width, 0.5 * (width - 1), 0.5 * (height - 1));
}

Raster to_rgb(const Image& image) {
  const Raster& src = image.raster();
  if (src.channels() == 3) return src;
  Raster out(src.width(), src.height(), 3);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = src.channels() == 1 ? src.at(x, y, 0) : src.at(x, y, c);
      }
    }
  }
  return out;
}

TiledMpi build_tmpi(const Image& image, const DepthMap& depth, const TmpiConfig& config,
                    const std::optional<Camera>& source_camera) {
  if (image.width() != depth.width() || image.height() != depth.height()) {
    throw std::invalid_argument("image and depth map differ in size");
  }
  if (config.planes < 1) throw std::invalid_argument("need at least one plane per tile");
  const int stride = config.stride > 0 ? config.stride : default_stride(config.tile_size);
  const TileGrid grid = make_grid(image.width(), image.height(), config.tile_size, stride);

  const TileStack rgb_tiles = unfold(to_rgb(image), grid);
  const TileStack depth_tiles = unfold(depth.raster(), grid);
  std::optional<TileStack> residual_tiles;
  if (config.confidence == ConfidenceMode::kRobust) {
    residual_tiles = unfold(median_residual(depth.raster(), config.confidence_window), grid);
  }

  TiledMpi tmpi{grid, std::vector<TileMpi>(grid.tile_count()), config.planes,
                source_camera.value_or(default_camera(image.width(), image.height()))};

  parallel_for(grid.tile_count(), config.threads, [&](std::size_t i) {
    const Raster& tile_depth = depth_tiles.tiles[i];
    Raster conf(grid.tile_size(), grid.tile_size(), 1, 1.0f);
    if (residual_tiles) {
      const auto d = tile_depth.data();
      const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
      const double scale = config.confidence_scale_fraction * (static_cast<double>(*hi) - *lo);
      if (scale > 0.0) {
        const auto res = residual_tiles->tiles[i].data();
        auto out = conf.data();
        for (std::size_t p = 0; p < res.size(); ++p) {
          out[p] = static_cast<float>(std::exp(-res[p] / scale));
        }
      }
    }
    TileMpiOptions options;
    options.restarts = config.restarts;
    options.soften_radius = config.soften_radius;
    options.seed = split_seed(config.seed, i);
    options.kmeans = config.kmeans;
    tmpi.tiles[i] = build_tile_mpi(rgb_tiles.tiles[i], tile_depth, conf, config.planes, options,
                                   grid.origin(i));
  });
  return tmpi;
}

std::size_t texture_scalars(const TiledMpi& tmpi) {
  const std::size_t h = static_cast<std::size_t>(tmpi.grid.tile_size());
  std::size_t planes = 0;
  for (const auto& tile : tmpi.tiles) planes += tile.planes.size();
  return planes * h * h * 4;
}

std::size_t monolithic_scalars(int width, int height, int planes) {
  return static_cast<std::size_t>(width) * height * planes * 4;
}

}  // namespace tmpi
