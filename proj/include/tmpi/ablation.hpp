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
#include <string>
#include <vector>

#include "tmpi/core.hpp"

namespace tmpi {

// Synthetic plane-placement comparison: piecewise-constant depth tiles are
// corrupted with Gaussian noise and sparse speckle, then each strategy's
// discretized depth is scored against the clean tile.
struct AblationConfig {
  int tiles = 100;
  int tile_size = 64;
  int planes = 4;
  double noise_variance = 1e-3;
  double outlier_fraction = 0.01;
  int min_regions = 2;
  int max_regions = 4;
  double min_depth = 1.0;
  double max_depth = 8.0;
  // Speckle depth is the true depth times a factor drawn from this range.
  double outlier_scale_min = 3.0;
  double outlier_scale_max = 10.0;
  int restarts = 4;
  int confidence_window = 5;
  double confidence_scale_fraction = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct AblationRow {
  std::string method;
  double mean_l1 = 0.0;
  double stddev_l1 = 0.0;
};

struct AblationResult {
  // linear-disparity, kmeans, weighted-kmeans, in that order.
  std::vector<AblationRow> rows;
  const AblationRow& row(const std::string& method) const;
};

struct SyntheticTile {
  Raster clean;
  Raster noisy;
};

SyntheticTile make_synthetic_tile(const AblationConfig& config, std::uint64_t tile_seed);

AblationResult run_placement_ablation(const AblationConfig& config);

std::string format_ablation_table(const AblationResult& result);

}  // namespace tmpi
