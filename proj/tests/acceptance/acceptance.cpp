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

// Acceptance suite: one PASS/FAIL line per criterion, with the measured value,
// the pinned tolerance and the wall-clock limit.

#include <Eigen/Geometry>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "../golden.hpp"
#include "../test_util.hpp"
#include "tmpi/ablation.hpp"
#include "tmpi/mpigen.hpp"
#include "tmpi/placement.hpp"
#include "tmpi/render.hpp"
#include "tmpi/tiling.hpp"
#include "tmpi/tmpi_file.hpp"

using namespace tmpi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::Matrix3d small_rotation(std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> u(-max_angle, max_angle);
  return (Eigen::AngleAxisd(u(rng), Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(u(rng), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(u(rng), Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

// Random photo-like input: noise texture and a piecewise depth with gradients.
std::pair<Image, DepthMap> random_scene(int w, int h, std::mt19937_64& rng) {
  Image img(test::random_raster(w, h, 3, rng));
  Raster depth = test::voronoi_depth(w, h, 12, rng, 1.0, 10.0);
  std::uniform_real_distribution<double> slope(-0.01, 0.01);
  const double sx = slope(rng), sy = slope(rng);
  std::normal_distribution<float> noise(0.0f, 0.05f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      depth.at(x, y) = std::max(0.2f, depth.at(x, y) + static_cast<float>(sx * x + sy * y) + noise(rng));
    }
  }
  return {std::move(img), DepthMap(std::move(depth))};
}

// ---------------------------------------------------------------------------

Outcome grid_arithmetic() {
  const TileGrid big = make_grid(1152, 768, 128, 112);
  const TileGrid small = make_grid(384, 256, 64, default_stride(64));
  const bool ok = big.columns() == 11 && big.rows() == 7 && big.tile_count() == 77 &&
                  small.tile_count() == 35;
  return {ok, "1152x768/h128/r112 -> " + std::to_string(big.rows()) + "x" +
                  std::to_string(big.columns()) + " grid; 384x256/h64/r56 -> " +
                  std::to_string(small.tile_count()) + " tiles (expect 7x11, 35)"};
}

Outcome identity_render() {
  std::mt19937_64 rng(1001);
  double worst_max = 0.0, worst_l1 = 0.0;
  const int pairs = 20;
  for (int i = 0; i < pairs; ++i) {
    auto [img, depth] = random_scene(384, 256, rng);
    TmpiConfig cfg;
    cfg.soften_radius = 0;
    cfg.seed = i;
    const TiledMpi t = build_tmpi(img, depth, cfg);
    const Image out = render_tmpi(t, t.source_camera);
    double l1 = 0.0;
    for (std::size_t p = 0; p < out.raster().size(); ++p) {
      const double d = std::abs(static_cast<double>(out.raster().data()[p]) - img.raster().data()[p]);
      worst_max = std::max(worst_max, d);
      l1 += d;
    }
    worst_l1 = std::max(worst_l1, l1 / static_cast<double>(out.raster().size()));
  }
  return {worst_max < 1e-5 && worst_l1 < 1e-6,
          std::to_string(pairs) + " pairs 384x256, max err " + fmt("%.3g", worst_max) +
              " (< 1e-5), L1 " + fmt("%.3g", worst_l1) + " (< 1e-6)"};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> depth(1.0, 12.0), off(-0.15, 0.15), f(80.0, 200.0);
  double worst = 0.0;
  const int size = 128;
  for (int scene = 0; scene < 50; ++scene) {
    const int n = count(rng);
    std::vector<double> ds(n);
    for (double& d : ds) d = depth(rng);
    std::sort(ds.begin(), ds.end());
    std::vector<RgbaPlane> planes;
    for (int j = 0; j < n; ++j) {
      planes.push_back({test::random_raster(size, size, 3, rng), test::random_raster(size, size, 1, rng),
                        static_cast<float>(ds[j])});
    }
    const double focal = f(rng);
    const Camera src(focal, focal, 63.5, 63.5);
    const Camera dst(focal, focal, 63.5, 63.5, small_rotation(rng, 0.05),
                     Eigen::Vector3d(off(rng), off(rng), off(rng)));
    TiledMpi t{make_grid(size, size, size, size), {TileMpi{planes, {0, 0}}}, n, src};
    RenderTask task{&t, dst, size, size, {0.25f, 0.5f, 0.75f}};
    const Image a = render_tmpi(task);
    const Image b = render_mpi_reference(planes, src, dst, size, size, task.background);
    worst = std::max(worst, test::max_abs_diff(a.raster(), b.raster()));
  }
  return {worst <= 1e-6, "50 scenes 128x128, N<=8, max abs diff " + fmt("%.3g", worst) + " (<= 1e-6)"};
}

// Smooth random texture: a few sinusoids per channel.
Image smooth_texture(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(0.03, 0.15), phase(0.0, 6.28);
  Raster r(w, h, 3);
  for (int c = 0; c < 3; ++c) {
    double fx[3], fy[3], ph[3];
    for (int k = 0; k < 3; ++k) {
      fx[k] = freq(rng);
      fy[k] = freq(rng);
      ph[k] = phase(rng);
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = 0.5;
        for (int k = 0; k < 3; ++k) v += 0.15 * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        r.at(x, y, c) = static_cast<float>(v);
      }
    }
  }
  return Image(std::move(r));
}

double bilinear(const Image& img, double x, double y, int c) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double ax = x - x0, ay = y - y0;
  return (1 - ax) * (1 - ay) * img.at(x0, y0, c) + ax * (1 - ay) * img.at(x0 + 1, y0, c) +
         (1 - ax) * ay * img.at(x0, y0 + 1, c) + ax * ay * img.at(x0 + 1, y0 + 1, c);
}

// Horizontal displacement m that best explains out(x) = src(x - m) over the
// interior: integer correlation peak, then golden-section refinement.
double measure_shift(const Image& src, const Image& out, int margin) {
  auto ssd = [&](double m) {
    double s = 0.0;
    for (int y = margin; y < src.height() - margin; y += 2) {
      for (int x = margin; x < src.width() - margin; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double d = out.at(x, y, c) - bilinear(src, x - m, y, c);
          s += d * d;
        }
      }
    }
    return s;
  };
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int m = -margin + 2; m <= margin - 2; ++m) {
    const double cost = ssd(m);
    if (cost < best_cost) {
      best_cost = cost;
      best = m;
    }
  }
  double lo = best - 1.0, hi = best + 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = ssd(a), fb = ssd(b);
  for (int it = 0; it < 40; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = ssd(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = ssd(b);
    }
  }
  return 0.5 * (lo + hi);
}

Outcome parallax_law() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> f(150.0, 500.0), b(0.005, 0.05), d(1.0, 8.0);
  const int w = 320, h = 192, margin = 40;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double focal = f(rng), base = b(rng), depth = d(rng);
    const Image img = smooth_texture(w, h, rng);
    const DepthMap flat(Raster(w, h, 1, static_cast<float>(depth)));
    const Camera src(focal, focal, (w - 1) / 2.0, (h - 1) / 2.0);
    const TiledMpi t = build_tmpi(img, flat, TmpiConfig{}, src);
    const Image out = render_tmpi(t, src.moved_by({base, 0.0, 0.0}));
    const double measured = measure_shift(img, out, margin);
    worst = std::max(worst, std::abs(measured - (-focal * base / depth)));
  }
  return {worst <= 0.05, "10 (f, b, d) cases, worst |shift - (-f*b/d)| " + fmt("%.4f", worst) +
                             " px (<= 0.05)"};
}

Outcome placement_ablation() {
  AblationConfig cfg;
  cfg.tiles = 200;
  cfg.seed = 1;
  const AblationResult r = run_placement_ablation(cfg);
  const double lin = r.row("linear-disparity").mean_l1;
  const double km = r.row("kmeans").mean_l1;
  const double wkm = r.row("weighted-kmeans").mean_l1;
  const double gap_lo = (km - wkm) / km;
  const double gap_hi = (lin - km) / lin;
  const bool ok = wkm < km && km < lin && gap_lo > 0.05 && gap_hi > 0.05;
  return {ok, "200 tiles: weighted " + fmt("%.4f", wkm) + " < kmeans " + fmt("%.4f", km) +
                  " < linear " + fmt("%.4f", lin) + ", gaps " + fmt("%.1f%%", 100 * gap_lo) +
                  " / " + fmt("%.1f%%", 100 * gap_hi) + " (> 5%)"};
}

double exhaustive_inertia(const std::vector<float>& x, const std::vector<float>& w, int k) {
  const std::size_t n = x.size();
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      double sw = 0.0, swx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == c) {
          sw += w[i];
          swx += static_cast<double>(w[i]) * x[i];
        }
      }
      if (sw <= 0.0) continue;
      const double mean = swx / sw;
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == c) total += w[i] * (x[i] - mean) * (x[i] - mean);
      }
    }
    best = std::min(best, total);
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

Outcome kmeans_optimality() {
  std::mt19937_64 rng(1006);
  std::uniform_int_distribution<int> size(1, 8), clusters(1, 3), grid(1, 5);
  std::uniform_real_distribution<float> depth(0.5f, 20.0f), weight(0.05f, 1.0f);
  int failures = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const int n = size(rng);
    const int k = clusters(rng);
    std::vector<float> x(n), w(n);
    for (int i = 0; i < n; ++i) {
      // Every other instance uses a coarse value grid so ties and duplicates occur.
      x[i] = inst % 2 == 0 ? depth(rng) : static_cast<float>(grid(rng));
      w[i] = weight(rng);
    }
    const ClusterResult r = place_planes(Raster(n, 1, 1, x), Raster(n, 1, 1, w), k, 8, inst);
    const double gap = std::abs(r.inertia - exhaustive_inertia(x, w, k));
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++failures;
  }
  return {failures == 0, "1000 instances (<= 8 samples, n <= 3), " + std::to_string(failures) +
                             " off optimum, worst gap " + fmt("%.3g", worst) + " (<= 1e-9)"};
}

Outcome compositing_algebra() {
  std::mt19937_64 rng(1007);
  std::uniform_int_distribution<int> count(1, 16);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int n = count(rng);
    std::vector<Raster> stack;
    for (int i = 0; i < n; ++i) stack.push_back(test::random_raster(3, 3, 4, rng));
    const Color3 bg = {u(rng), u(rng), u(rng)};
    const Image out = composite_over(stack, bg);
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        for (int c = 0; c < 3; ++c) {
          // sum_i a_i c_i prod_{j > i}(1 - a_j) + bg prod_j (1 - a_j), index 0 at the back
          double sum = 0.0;
          for (int i = 0; i < n; ++i) {
            double t = 1.0;
            for (int j = i + 1; j < n; ++j) t *= 1.0 - stack[j].at(x, y, 3);
            sum += stack[i].at(x, y, 3) * stack[i].at(x, y, c) * t;
          }
          double all = 1.0;
          for (int j = 0; j < n; ++j) all *= 1.0 - stack[j].at(x, y, 3);
          worst = std::max(worst, std::abs(out.at(x, y, c) - (sum + bg[c] * all)));
        }
      }
    }
  }
  return {worst <= 1e-6, "1000 stacks (N <= 16), max abs diff " + fmt("%.3g", worst) + " (<= 1e-6)"};
}

Outcome format_round_trip() {
  std::mt19937_64 rng(1008);
  const auto dir = std::filesystem::temp_directory_path() / "tmpi_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = dir / "round.tmpi";
  int depth_mismatch = 0;
  double color_err = 0.0;
  std::uniform_int_distribution<int> extra(0, 60), planes(1, 6), hs(8, 24);
  std::uniform_real_distribution<float> step(1e-3f, 3.0f);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = hs(rng);
    const int w = h + extra(rng), hh = h + extra(rng);
    std::uniform_int_distribution<int> rs(1, h);
    const int n = planes(rng);
    std::uniform_int_distribution<int> ks(1, n);
    std::uniform_real_distribution<double> cam(-1.0, 1.0);
    TiledMpi t{make_grid(w, hh, h, rs(rng)), {}, n,
               Camera(100 + cam(rng), 90 + cam(rng), cam(rng) * 50, cam(rng) * 50,
                      small_rotation(rng, 1.0), Eigen::Vector3d(cam(rng), cam(rng), cam(rng)))};
    for (std::size_t i = 0; i < t.grid.tile_count(); ++i) {
      TileMpi tile;
      tile.origin = t.grid.origin(i);
      float d = step(rng);
      const int k = ks(rng);
      for (int j = 0; j < k; ++j) {
        tile.planes.push_back({test::random_raster(h, h, 3, rng), test::random_raster(h, h, 1, rng), d});
        d += step(rng);
      }
      t.tiles.push_back(std::move(tile));
    }
    write_tmpi(t, path);
    const TiledMpi back = read_tmpi(path);
    if (!(back.source_camera == t.source_camera) || !(back.grid == t.grid) ||
        back.tiles.size() != t.tiles.size()) {
      return {false, "header mismatch on trial " + std::to_string(trial)};
    }
    for (std::size_t i = 0; i < t.tiles.size(); ++i) {
      if (back.tiles[i].planes.size() != t.tiles[i].planes.size()) {
        return {false, "plane count mismatch on trial " + std::to_string(trial)};
      }
      for (std::size_t j = 0; j < t.tiles[i].planes.size(); ++j) {
        const RgbaPlane& a = t.tiles[i].planes[j];
        const RgbaPlane& b = back.tiles[i].planes[j];
        if (std::memcmp(&a.depth, &b.depth, sizeof(float)) != 0) ++depth_mismatch;
        color_err = std::max({color_err, test::max_abs_diff(a.color, b.color),
                              test::max_abs_diff(a.alpha, b.alpha)});
      }
    }
  }
  const auto golden = test::read_bytes(TMPI_TEST_DATA_DIR "/golden_small.tmpi");
  const bool golden_ok = encode_tmpi(test::golden_tmpi()) == golden &&
                         encode_tmpi(decode_tmpi(golden)) == golden;
  const bool ok = depth_mismatch == 0 && color_err <= 1.0 / 255.0 && golden_ok;
  return {ok, "50 files: " + std::to_string(depth_mismatch) + " depth mismatches, max color err " +
                  fmt("%.5f", color_err) + " (<= 1/255), golden bytes " +
                  (golden_ok ? "match" : "DIFFER")};
}

Outcome memory_accounting() {
  std::mt19937_64 rng(1009);
  const int w = 630, h = 350;
  auto [img, depth] = random_scene(w, h, rng);
  const TiledMpi t = build_tmpi(img, depth, TmpiConfig{});
  const double stored = static_cast<double>(texture_scalars(t));
  const double bound = static_cast<double>(t.tiles.size()) * 4 * 64 * 64 * 4;
  const double full = static_cast<double>(monolithic_scalars(w, h, 32));
  const double ratio = stored / full;
  return {ratio < 0.25 && bound / full < 0.25,
          std::to_string(t.tiles.size()) + " tiles, stored " + fmt("%.0f", stored) +
              " scalars = " + fmt("%.1f%%", 100 * ratio) + " of 32-plane MPI (bound " +
              fmt("%.1f%%", 100 * bound / full) + ", < 25%)"};
}

Outcome determinism() {
  std::mt19937_64 rng(1010);
  auto [img, depth] = random_scene(384, 256, rng);
  const int many = std::max(4u, std::thread::hardware_concurrency());
  auto run = [&](int threads) {
    TmpiConfig cfg;
    cfg.seed = 77;
    cfg.threads = threads;
    const TiledMpi t = build_tmpi(img, depth, cfg);
    const Camera target(t.source_camera.fx(), t.source_camera.fy(), t.source_camera.cx(),
                        t.source_camera.cy(), small_rotation(rng, 0.0),
                        Eigen::Vector3d(-0.04, 0.02, 0.03));
    return std::make_pair(encode_tmpi(t), render_tmpi(t, target, threads).raster());
  };
  const auto one = run(1);
  const auto multi = run(many);
  const bool ok = one.first == multi.first && one.second == multi.second;
  return {ok, "1 vs " + std::to_string(many) + " threads: TMPI bytes " +
                  (one.first == multi.first ? "identical" : "differ") + ", render " +
                  (one.second == multi.second ? "identical" : "differs")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"grid-arithmetic", 1.0, grid_arithmetic},
      {"identity-render", 60.0, identity_render},
      {"oracle-equivalence", 60.0, oracle_equivalence},
      {"parallax-law", 30.0, parallax_law},
      {"placement-ablation", 120.0, placement_ablation},
      {"kmeans-optimality", 60.0, kmeans_optimality},
      {"compositing-algebra", 10.0, compositing_algebra},
      {"format-round-trip", 30.0, format_round_trip},
      {"memory-accounting", 60.0, memory_accounting},
      {"determinism", 120.0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  %-20s %s; %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
