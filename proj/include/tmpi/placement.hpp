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
#include <span>
#include <vector>

#include "tmpi/core.hpp"

namespace tmpi {

// Plane depths in metric units, strictly increasing.
struct PlaneSet {
  std::vector<double> depths;
  std::size_t size() const { return depths.size(); }
};

// Per-pixel index into a PlaneSet.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct ClusterResult {
  PlaneSet planes;
  LabelMap labels;
  int iterations = 0;
  double inertia = 0.0;
  // Inertia after every assignment step, final assignment last.
  std::vector<double> inertia_history;
};

struct KMeansOptions {
  int max_iter = 50;
  double tol = 1e-5;
};

// |depth - median of the window around it|, border pixels use the clamped window.
Raster median_residual(const Raster& depth, int window);

// exp(-median_residual / scale). Speckle gets low confidence, smooth areas ~1.
Raster estimate_confidence(const Raster& depth, int window, double scale);
ConfidenceMap estimate_confidence(const DepthMap& depth, int window, double scale);

// n planes equally spaced in inverse depth between d_min and d_max (inclusive).
// Coincident depths are merged, so a degenerate range yields one plane.
PlaneSet linear_disparity_planes(double d_min, double d_max, int n);

// Deterministic seeds: the (j + 0.5)/n weighted quantiles of the positive-weight
// samples, topped up with farthest distinct values when quantiles coincide.
std::vector<double> quantile_seeds(std::span<const float> depths, std::span<const float> weights,
                                   int n);

// Lloyd iterations on 1-D samples with confidence-weighted center updates.
// Clusters that lose all weight are dropped, so fewer than n planes may come back.
ClusterResult weighted_kmeans(const Raster& depths, const Raster& weights, int n,
                              const KMeansOptions& options = {});
ClusterResult weighted_kmeans(const Raster& depths, const Raster& weights,
                              std::vector<double> initial_centers,
                              const KMeansOptions& options = {});

// Best of `restarts` runs by inertia: the first run uses quantile seeds, the
// rest use seeded D²-weighted sampling.
ClusterResult place_planes(const Raster& depth, const Raster& confidence, int n, int restarts,
                           std::uint64_t seed, const KMeansOptions& options = {});

// Nearest-plane labels, ties going to the lower index.
LabelMap assign_labels(const Raster& depth, const PlaneSet& planes);

Raster discretize(const LabelMap& labels, const PlaneSet& planes);
Raster discretize(const Raster& depth, const ClusterResult& result);

// Mean absolute difference.
double reconstruction_error(const Raster& original, const Raster& discretized);
double reconstruction_error(const DepthMap& original, const DepthMap& discretized);

// Uniform double in [0, 1) from a 64-bit generator output; stable across platforms.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed for work item `index` (splitmix64).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace tmpi
