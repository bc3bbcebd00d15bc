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

#include "tmpi/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "tmpi/parallel.hpp"
#include "tmpi/placement.hpp"

namespace tmpi {

namespace {

// Box-Muller on the platform-stable unit_double.
double gaussian(std::mt19937_64& rng) {
  double u1 = unit_double(rng());
  while (u1 <= 0.0) u1 = unit_double(rng());
  const double u2 = unit_double(rng());
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_double(rng());
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

const AblationRow& AblationResult::row(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method) return r;
  }
  throw std::out_of_range("no ablation row named " + method);
}

SyntheticTile make_synthetic_tile(const AblationConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int h = config.tile_size;
  const int span = config.max_regions - config.min_regions + 1;
  const int regions = config.min_regions + static_cast<int>(rng() % static_cast<std::uint64_t>(span));

  // Voronoi cells around random sites, one constant depth per cell.
  std::vector<double> sx(regions), sy(regions), level(regions);
  for (int k = 0; k < regions; ++k) {
    sx[k] = uniform(rng, 0.0, h);
    sy[k] = uniform(rng, 0.0, h);
    level[k] = uniform(rng, config.min_depth, config.max_depth);
  }

  SyntheticTile tile{Raster(h, h, 1), Raster(h, h, 1)};
  const double sigma = std::sqrt(config.noise_variance);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < h; ++x) {
      int best = 0;
      double best_d = 1e300;
      for (int k = 0; k < regions; ++k) {
        const double d = (x - sx[k]) * (x - sx[k]) + (y - sy[k]) * (y - sy[k]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      const double clean = level[best];
      double noisy = clean + sigma * gaussian(rng);
      if (unit_double(rng()) < config.outlier_fraction) {
        noisy = clean * uniform(rng, config.outlier_scale_min, config.outlier_scale_max);
      }
      tile.clean.at(x, y) = static_cast<float>(clean);
      tile.noisy.at(x, y) = static_cast<float>(std::max(noisy, 1e-3));
    }
  }
  return tile;
}

AblationResult run_placement_ablation(const AblationConfig& config) {
  if (config.tiles < 1) throw std::invalid_argument("ablation needs at least one tile");
  const std::size_t count = static_cast<std::size_t>(config.tiles);
  std::vector<double> linear(count), vanilla(count), weighted(count);

  parallel_for(count, config.threads, [&](std::size_t i) {
    const std::uint64_t seed = split_seed(config.seed, i);
    const SyntheticTile tile = make_synthetic_tile(config, seed);
    const auto noisy = tile.noisy.data();
    const auto [lo, hi] = std::minmax_element(noisy.begin(), noisy.end());

    const PlaneSet lin = linear_disparity_planes(*lo, *hi, config.planes);
    linear[i] = reconstruction_error(tile.clean, discretize(assign_labels(tile.noisy, lin), lin));

    const Raster ones(config.tile_size, config.tile_size, 1, 1.0f);
    const ClusterResult plain = place_planes(tile.noisy, ones, config.planes, config.restarts, seed);
    vanilla[i] = reconstruction_error(tile.clean, discretize(tile.noisy, plain));

    const double range = static_cast<double>(*hi) - *lo;
    const Raster conf =
        range > 0.0 ? estimate_confidence(tile.noisy, config.confidence_window,
                                          config.confidence_scale_fraction * range)
                    : ones;
    const ClusterResult robust = place_planes(tile.noisy, conf, config.planes, config.restarts, seed);
    weighted[i] = reconstruction_error(tile.clean, discretize(tile.noisy, robust));
  });

  AblationResult result;
  for (auto [name, values] : {std::pair{"linear-disparity", &linear},
                              std::pair{"kmeans", &vanilla},
                              std::pair{"weighted-kmeans", &weighted}}) {
    const double m = mean(*values);
    result.rows.push_back({name, m, stddev(*values, m)});
  }
  return result;
}

std::string format_ablation_table(const AblationResult& result) {
  std::string out = "method              mean_L1     std_L1\n";
  char line[128];
  for (const auto& r : result.rows) {
    std::snprintf(line, sizeof(line), "%-18s %9.5f  %9.5f\n", r.method.c_str(), r.mean_l1,
                  r.stddev_l1);
    out += line;
  }
  return out;
}

}  // namespace tmpi
