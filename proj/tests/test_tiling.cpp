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

#include <doctest.h>

#include <random>
#include <vector>

#include "test_util.hpp"
#include "tmpi/tiling.hpp"

using namespace tmpi;

TEST_SUITE("tiling") {
  TEST_CASE("grid arithmetic") {
    const TileGrid g = make_grid(1152, 768, 128, 112);
    CHECK(g.columns() == 11);
    CHECK(g.rows() == 7);
    CHECK(g.tile_count() == 77);
    CHECK(default_stride(128) == 112);
    CHECK(default_stride(64) == 56);

    const TileGrid single = make_grid(64, 64, 64, 56);
    CHECK(single.tile_count() == 1);
    CHECK(single.origin(0) == TileOrigin{0, 0});

    const TileGrid s = make_grid(384, 256, 64, 56);
    CHECK(s.column_origins() == std::vector<int>{0, 56, 112, 168, 224, 280, 320});
    CHECK(s.row_origins() == std::vector<int>{0, 56, 112, 168, 192});
    CHECK(s.tile_count() == 35);
    CHECK(s.origin(8) == TileOrigin{56, 56});
  }

  TEST_CASE("grid rejects bad parameters") {
    CHECK_THROWS(make_grid(100, 50, 64, 56));
    CHECK_THROWS(make_grid(100, 100, 64, 0));
    CHECK_THROWS(make_grid(100, 100, 64, 65));
    CHECK_THROWS(make_grid(0, 100, 64, 56));
  }

  TEST_CASE("randomized grids cover every pixel and stay inside the frame") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::uniform_int_distribution<int> dim(8, 300);
      const int w = dim(rng), hgt = dim(rng);
      std::uniform_int_distribution<int> hs(1, std::min(w, hgt));
      const int h = hs(rng);
      std::uniform_int_distribution<int> rs(1, h);
      const int r = rs(rng);
      const TileGrid g = make_grid(w, hgt, h, r);
      std::vector<int> cover(static_cast<std::size_t>(w) * hgt, 0);
      for (const TileOrigin& o : g.origins()) {
        REQUIRE(o.x >= 0);
        REQUIRE(o.y >= 0);
        REQUIRE(o.x <= w - h);
        REQUIRE(o.y <= hgt - h);
        for (int y = o.y; y < o.y + h; ++y) {
          for (int x = o.x; x < o.x + h; ++x) cover[static_cast<std::size_t>(y) * w + x] = 1;
        }
      }
      for (int c : cover) REQUIRE(c == 1);
    }
  }

  TEST_CASE("unfold is plain cropping") {
    Raster ramp(384, 256, 1);
    for (int y = 0; y < 256; ++y) {
      for (int x = 0; x < 384; ++x) ramp.at(x, y) = static_cast<float>(x) / 384.0f;
    }
    const TileGrid g = make_grid(384, 256, 64, 56);
    const TileStack s = unfold(ramp, g);
    REQUIRE(s.tiles.size() == 35);
    CHECK(s.tiles[1].at(0, 0) == 56.0f / 384.0f);

    const TileStack c = unfold(Raster(384, 256, 3, 0.25f), g);
    for (const Raster& t : c.tiles) {
      for (float v : t.data()) CHECK(v == 0.25f);
    }

    std::mt19937_64 rng(12);
    const Raster img = test::random_raster(64, 64, 3, rng);
    CHECK(unfold(img, make_grid(64, 64, 64, 56)).tiles[0] == img);

    const Raster big = test::random_raster(100, 90, 2, rng);
    const TileGrid g2 = make_grid(100, 90, 20, 13);
    const TileStack s2 = unfold(big, g2);
    for (std::size_t i = 0; i < s2.tiles.size(); ++i) {
      const TileOrigin o = g2.origin(i);
      CHECK(s2.tiles[i] == big.crop(o.x, o.y, 20, 20));
    }
  }

  TEST_CASE("blend weights") {
    const BlendWeights none = default_blend_weights(16, 16);
    for (float v : none.weights.data()) CHECK(v == 1.0f);

    const BlendWeights bw = default_blend_weights(8, 6);
    const float eps = kBlendFloor;
    const float a = eps + (1.0f - eps) * (1.0f / 3.0f);
    const float b = eps + (1.0f - eps) * (2.0f / 3.0f);
    const float expected[8] = {a, b, 1, 1, 1, 1, b, a};
    for (int x = 0; x < 8; ++x) {
      CHECK(bw.weights.at(x, 4) == doctest::Approx(expected[x]).epsilon(1e-6));
      CHECK(bw.weights.at(x, 0) == doctest::Approx(expected[x] * a).epsilon(1e-6));
    }
  }

  TEST_CASE("fold of all-ones tiles is all ones") {
    const TileGrid g = make_grid(384, 256, 64, 56);
    TileStack s{g, std::vector<Raster>(g.tile_count(), Raster(64, 64, 1, 1.0f))};
    const Raster out = fold(s, default_blend_weights(64, 56));
    for (float v : out.data()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));
  }

  TEST_CASE("fold is the weighted mean of overlapping tiles") {
    const TileGrid g = make_grid(12, 8, 8, 4);
    REQUIRE(g.tile_count() == 2);
    TileStack s{g, {Raster(8, 8, 1, 0.0f), Raster(8, 8, 1, 1.0f)}};
    BlendWeights flat{8, 4, Raster(8, 8, 1, 1.0f)};
    const Raster out = fold(s, flat);
    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(5, 3) == 0.5f);
    CHECK(out.at(11, 3) == 1.0f);
  }

  TEST_CASE("fold matches a brute-force weighted average") {
    std::mt19937_64 rng(13);
    const TileGrid g = make_grid(384, 256, 64, 56);
    const BlendWeights bw = default_blend_weights(64, 56);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> constants(g.tile_count());
    TileStack s{g, {}};
    for (float& c : constants) {
      c = u(rng);
      s.tiles.emplace_back(64, 64, 1, c);
    }
    const Raster out = fold(s, bw);
    double worst = 0.0;
    for (int y = 0; y < 256; ++y) {
      for (int x = 0; x < 384; ++x) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.tile_count(); ++i) {
          const TileOrigin o = g.origin(i);
          if (x < o.x || y < o.y || x >= o.x + 64 || y >= o.y + 64) continue;
          const double w = bw.weights.at(x - o.x, y - o.y);
          num += w * constants[i];
          den += w;
        }
        worst = std::max(worst, std::abs(num / den - out.at(x, y)));
      }
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("fold inverts unfold on random rasters and grids") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
      std::uniform_int_distribution<int> dim(16, 120);
      const int w = dim(rng), hgt = dim(rng);
      std::uniform_int_distribution<int> hs(8, std::min(w, hgt));
      const int h = hs(rng);
      std::uniform_int_distribution<int> rs(1, h);
      const int r = rs(rng);
      const Raster img = test::random_raster(w, hgt, 1 + trial % 3, rng);
      const TileGrid g = make_grid(w, hgt, h, r);
      const Raster back = fold(unfold(img, g), default_blend_weights(h, r));
      REQUIRE(test::max_abs_diff(img, back) < 1e-6);
    }
  }
}
