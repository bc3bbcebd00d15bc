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

#include "tmpi/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace tmpi {

namespace {

void check_samples(std::span<const float> depths, std::span<const float> weights) {
  if (depths.size() != weights.size()) {
    throw std::invalid_argument("depth and weight rasters differ in size");
  }
  if (depths.empty()) throw std::invalid_argument("no samples to cluster");
  double total = 0.0;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!std::isfinite(depths[i]) || depths[i] <= 0.0f) {
      throw std::invalid_argument("cluster samples must be positive depths");
    }
    if (!std::isfinite(weights[i]) || weights[i] < 0.0f) {
      throw std::invalid_argument("cluster weights must be non-negative");
    }
    total += weights[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("all cluster weights are zero");
}

// Sorted distinct depths among samples carrying weight.
std::vector<double> weighted_support(std::span<const float> depths,
                                     std::span<const float> weights) {
  std::vector<double> values;
  values.reserve(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (weights[i] > 0.0f) values.push_back(depths[i]);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

double distance_to_nearest(double v, const std::vector<double>& centers) {
  double best = std::numeric_limits<double>::infinity();
  for (double c : centers) best = std::min(best, std::abs(v - c));
  return best;
}

// Fills `labels`, returns weighted inertia. Centers must be sorted.
double assign(std::span<const float> depths, std::span<const float> weights,
              const std::vector<double>& centers, std::vector<int>& labels) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double d = depths[i];
    int best = 0;
    double best_dist = std::abs(d - centers[0]);
    for (int k = 1; k < static_cast<int>(centers.size()); ++k) {
      const double dist = std::abs(d - centers[k]);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    labels[i] = best;
    inertia += static_cast<double>(weights[i]) * best_dist * best_dist;
  }
  return inertia;
}

// Removes clusters whose members carry no weight; returns true if any were removed.
bool drop_weightless(std::span<const float> weights, std::vector<double>& centers,
                     const std::vector<int>& labels) {
  std::vector<double> mass(centers.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) mass[labels[i]] += weights[i];
  std::vector<double> kept;
  kept.reserve(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (mass[k] > 0.0) kept.push_back(centers[k]);
  }
  const bool changed = kept.size() != centers.size();
  centers = std::move(kept);
  return changed;
}

// Single-sample moves that strictly lower the weighted inertia, taking the
// shift of both affected means into account. Lloyd fixed points can still
// admit such moves; the result is again a nearest-center configuration.
// Returns true if any sample moved.
bool hartigan_refine(std::span<const float> depths, std::span<const float> weights,
                     std::vector<double>& centers, const std::vector<int>& labels) {
  const std::size_t k = centers.size();
  if (k < 2) return false;
  std::vector<int> label(labels);
  std::vector<double> mean(k);
  std::vector<double> mass(k, 0.0), sum(k, 0.0);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!(weights[i] > 0.0f)) continue;
    mass[label[i]] += weights[i];
    sum[label[i]] += static_cast<double>(weights[i]) * depths[i];
  }
  for (std::size_t c = 0; c < k; ++c) mean[c] = sum[c] / mass[c];

  bool any = false;
  constexpr int kMaxPasses = 100;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < depths.size(); ++i) {
      const double w = weights[i];
      if (!(w > 0.0)) continue;
      const double x = depths[i];
      const int a = label[i];
      if (!(mass[a] - w > 1e-12 * mass[a])) continue;
      const double da = x - mean[a];
      const double removal = w * mass[a] / (mass[a] - w) * da * da;
      int best = -1;
      double best_cost = removal * (1.0 - 1e-12);
      for (std::size_t b = 0; b < k; ++b) {
        if (static_cast<int>(b) == a) continue;
        const double db = x - mean[b];
        const double cost = w * mass[b] / (mass[b] + w) * db * db;
        if (cost < best_cost) {
          best_cost = cost;
          best = static_cast<int>(b);
        }
      }
      if (best < 0) continue;
      mass[a] -= w;
      sum[a] -= w * x;
      mass[best] += w;
      sum[best] += w * x;
      mean[a] = sum[a] / mass[a];
      mean[best] = sum[best] / mass[best];
      label[i] = best;
      moved = true;
    }
    if (!moved) break;
    any = true;
  }
  if (any) {
    centers = std::move(mean);
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  }
  return any;
}

ClusterResult run_lloyd(const Raster& depth_raster, const Raster& weight_raster,
                        std::vector<double> centers, const KMeansOptions& options) {
  const auto depths = depth_raster.data();
  const auto weights = weight_raster.data();
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  if (centers.empty()) throw std::invalid_argument("k-means needs at least one center");

  ClusterResult result;
  std::vector<int> labels(depths.size(), 0);
  std::vector<double> sum_w;
  std::vector<double> sum_wd;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    result.inertia_history.push_back(assign(depths, weights, centers, labels));

    sum_w.assign(centers.size(), 0.0);
    sum_wd.assign(centers.size(), 0.0);
    for (std::size_t i = 0; i < depths.size(); ++i) {
      sum_w[labels[i]] += weights[i];
      sum_wd[labels[i]] += static_cast<double>(weights[i]) * depths[i];
    }

    std::vector<double> updated;
    updated.reserve(centers.size());
    bool dropped = false;
    double motion = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (!(sum_w[k] > 0.0)) {
        dropped = true;
        continue;
      }
      const double c = sum_wd[k] / sum_w[k];
      motion = std::max(motion, std::abs(c - centers[k]) /
                                    std::max(std::abs(centers[k]), 1e-300));
      updated.push_back(c);
    }
    std::sort(updated.begin(), updated.end());
    updated.erase(std::unique(updated.begin(), updated.end()), updated.end());
    dropped = dropped || updated.size() != centers.size();
    centers = std::move(updated);
    result.iterations = iter + 1;
    if (!dropped && motion < options.tol) break;
  }

  double inertia = assign(depths, weights, centers, labels);
  while (drop_weightless(weights, centers, labels)) {
    inertia = assign(depths, weights, centers, labels);
  }
  if (hartigan_refine(depths, weights, centers, labels)) {
    result.inertia_history.push_back(inertia);
    inertia = assign(depths, weights, centers, labels);
    while (drop_weightless(weights, centers, labels)) {
      inertia = assign(depths, weights, centers, labels);
    }
  }
  result.inertia_history.push_back(inertia);
  result.inertia = inertia;
  result.planes.depths = std::move(centers);
  result.labels = {depth_raster.width(), depth_raster.height(), std::move(labels)};
  return result;
}

// D²-weighted seeding from a seeded generator.
std::vector<double> sampled_seeds(std::span<const float> depths, std::span<const float> weights,
                                  int n, std::mt19937_64& rng) {
  std::vector<double> centers;
  std::vector<double> cumulative(depths.size());
  for (int k = 0; k < n; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < depths.size(); ++i) {
      double p = weights[i];
      if (!centers.empty()) {
        const double dist = distance_to_nearest(depths[i], centers);
        p *= dist * dist;
      }
      total += p;
      cumulative[i] = total;
    }
    if (!(total > 0.0)) break;
    const double target = unit_double(rng()) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), depths.size() - 1);
    centers.push_back(depths[idx]);
  }
  return centers;
}

}  // namespace

Raster median_residual(const Raster& depth, int window) {
  if (depth.channels() != 1) throw std::invalid_argument("depth must be single-channel");
  if (window < 3 || window % 2 == 0) {
    throw std::invalid_argument("median window must be odd and >= 3");
  }
  const int half = window / 2;
  const int w = depth.width();
  const int h = depth.height();
  Raster out(w, h, 1);
  std::vector<float> buf;
  buf.reserve(static_cast<std::size_t>(window) * window);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      buf.clear();
      for (int yy = std::max(0, y - half); yy <= std::min(h - 1, y + half); ++yy) {
        for (int xx = std::max(0, x - half); xx <= std::min(w - 1, x + half); ++xx) {
          buf.push_back(depth.at(xx, yy));
        }
      }
      // Lower median for even counts at clamped borders.
      const auto mid = buf.begin() + static_cast<std::ptrdiff_t>((buf.size() - 1) / 2);
      std::nth_element(buf.begin(), mid, buf.end());
      out.at(x, y) = std::abs(depth.at(x, y) - *mid);
    }
  }
  return out;
}

Raster estimate_confidence(const Raster& depth, int window, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("confidence scale must be positive");
  Raster conf = median_residual(depth, window);
  for (float& v : conf.data()) v = static_cast<float>(std::exp(-v / scale));
  return conf;
}

ConfidenceMap estimate_confidence(const DepthMap& depth, int window, double scale) {
  return ConfidenceMap(estimate_confidence(depth.raster(), window, scale));
}

PlaneSet linear_disparity_planes(double d_min, double d_max, int n) {
  if (!(d_min > 0.0) || !std::isfinite(d_max) || d_max < d_min) {
    throw std::invalid_argument("need 0 < d_min <= d_max");
  }
  if (n < 1) throw std::invalid_argument("need at least one plane");
  PlaneSet planes;
  if (n == 1) {
    planes.depths.push_back(2.0 / (1.0 / d_min + 1.0 / d_max));
    return planes;
  }
  const double near_disp = 1.0 / d_min;
  const double far_disp = 1.0 / d_max;
  for (int j = 0; j < n; ++j) {
    double depth;
    if (j == 0) {
      depth = d_min;
    } else if (j == n - 1) {
      depth = d_max;
    } else {
      depth = 1.0 / (near_disp + (far_disp - near_disp) * j / (n - 1));
    }
    planes.depths.push_back(depth);
  }
  std::sort(planes.depths.begin(), planes.depths.end());
  planes.depths.erase(std::unique(planes.depths.begin(), planes.depths.end()),
                      planes.depths.end());
  return planes;
}

std::vector<double> quantile_seeds(std::span<const float> depths, std::span<const float> weights,
                                   int n) {
  if (n < 1) throw std::invalid_argument("need at least one cluster");
  check_samples(depths, weights);
  std::vector<std::size_t> order;
  order.reserve(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (weights[i] > 0.0f) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depths[a] < depths[b]; });
  std::vector<double> cumulative(order.size());
  double total = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    total += weights[order[k]];
    cumulative[k] = total;
  }

  std::vector<double> seeds;
  for (int j = 0; j < n; ++j) {
    const double target = (j + 0.5) / n * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), order.size() - 1);
    seeds.push_back(depths[order[k]]);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  // Coinciding quantiles: add the distinct value farthest from the current seeds.
  const std::vector<double> support = weighted_support(depths, weights);
  const std::size_t target_count = std::min<std::size_t>(n, support.size());
  while (seeds.size() < target_count) {
    double best_value = support.front();
    double best_dist = -1.0;
    for (double v : support) {
      const double dist = distance_to_nearest(v, seeds);
      if (dist > best_dist) {
        best_dist = dist;
        best_value = v;
      }
    }
    seeds.push_back(best_value);
    std::sort(seeds.begin(), seeds.end());
  }
  return seeds;
}

ClusterResult weighted_kmeans(const Raster& depths, const Raster& weights, int n,
                              const KMeansOptions& options) {
  if (!depths.same_shape(weights)) {
    throw std::invalid_argument("depth and weight rasters differ in shape");
  }
  return run_lloyd(depths, weights, quantile_seeds(depths.data(), weights.data(), n), options);
}

ClusterResult weighted_kmeans(const Raster& depths, const Raster& weights,
                              std::vector<double> initial_centers, const KMeansOptions& options) {
  if (!depths.same_shape(weights)) {
    throw std::invalid_argument("depth and weight rasters differ in shape");
  }
  check_samples(depths.data(), weights.data());
  return run_lloyd(depths, weights, std::move(initial_centers), options);
}

ClusterResult place_planes(const Raster& depth, const Raster& confidence, int n, int restarts,
                           std::uint64_t seed, const KMeansOptions& options) {
  if (restarts < 1) throw std::invalid_argument("need at least one k-means run");
  ClusterResult best = weighted_kmeans(depth, confidence, n, options);
  std::mt19937_64 rng(seed);
  for (int run = 1; run < restarts; ++run) {
    std::vector<double> seeds = sampled_seeds(depth.data(), confidence.data(), n, rng);
    ClusterResult candidate = run_lloyd(depth, confidence, std::move(seeds), options);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

LabelMap assign_labels(const Raster& depth, const PlaneSet& planes) {
  if (planes.depths.empty()) throw std::invalid_argument("empty plane set");
  LabelMap map{depth.width(), depth.height(), std::vector<int>(depth.size(), 0)};
  const auto data = depth.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    int best = 0;
    double best_dist = std::abs(data[i] - planes.depths[0]);
    for (int k = 1; k < static_cast<int>(planes.size()); ++k) {
      const double dist = std::abs(data[i] - planes.depths[k]);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    map.labels[i] = best;
  }
  return map;
}

Raster discretize(const LabelMap& labels, const PlaneSet& planes) {
  Raster out(labels.width, labels.height, 1);
  auto data = out.data();
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const int l = labels.labels[i];
    if (l < 0 || l >= static_cast<int>(planes.size())) {
      throw std::invalid_argument("label " + std::to_string(l) + " outside plane set");
    }
    data[i] = static_cast<float>(planes.depths[l]);
  }
  return out;
}

Raster discretize(const Raster& depth, const ClusterResult& result) {
  if (result.labels.width != depth.width() || result.labels.height != depth.height()) {
    throw std::invalid_argument("label map does not match depth tile");
  }
  return discretize(result.labels, result.planes);
}

double reconstruction_error(const Raster& original, const Raster& discretized) {
  if (!original.same_shape(discretized)) {
    throw std::invalid_argument("reconstruction error needs rasters of equal shape");
  }
  const auto a = original.data();
  const auto b = discretized.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(static_cast<double>(a[i]) - b[i]);
  return a.empty() ? 0.0 : sum / static_cast<double>(a.size());
}

double reconstruction_error(const DepthMap& original, const DepthMap& discretized) {
  return reconstruction_error(original.raster(), discretized.raster());
}

}  // namespace tmpi
