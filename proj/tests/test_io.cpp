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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "golden.hpp"
#include "test_util.hpp"
#include "tmpi/camera_io.hpp"
#include "tmpi/image_io.hpp"
#include "tmpi/tmpi_file.hpp"

using namespace tmpi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "tmpi_io_tests";
  fs::create_directories(dir);
  return dir;
}

TiledMpi random_tmpi(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(8, 40), planes(1, 5);
  const int h = 8;
  const int w = size(rng) + h, hgt = size(rng) + h;
  const int n = planes(rng);
  TiledMpi t{make_grid(w, hgt, h, 6), {}, n, Camera(40, 41, 10.25, 9.5)};
  std::uniform_real_distribution<float> step(0.01f, 2.0f);
  std::uniform_int_distribution<int> count(1, n);
  for (std::size_t i = 0; i < t.grid.tile_count(); ++i) {
    TileMpi tile;
    tile.origin = t.grid.origin(i);
    float d = 0.5f;
    const int k = count(rng);
    for (int j = 0; j < k; ++j) {
      d += step(rng);
      tile.planes.push_back({test::random_raster(h, h, 3, rng), test::random_raster(h, h, 1, rng), d});
    }
    t.tiles.push_back(tile);
  }
  return t;
}

// Holes alternate between zeros and NaNs.
float hole_value(int x) {
  return x % 2 == 0 ? 0.0f : std::numeric_limits<float>::quiet_NaN();
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

TmpiErrorCode decode_error(const std::vector<std::uint8_t>& bytes, long* tile = nullptr) {
  try {
    decode_tmpi(bytes);
  } catch (const TmpiFormatError& e) {
    if (tile) *tile = e.tile_index();
    return e.code();
  }
  FAIL("decode succeeded");
  return TmpiErrorCode::kIo;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("TMPI round trip") {
    std::mt19937_64 rng(51);
    const fs::path path = scratch_dir() / "round.tmpi";
    for (int trial = 0; trial < 10; ++trial) {
      const TiledMpi t = random_tmpi(rng);
      write_tmpi(t, path);
      CHECK_FALSE(fs::exists(path.string() + ".tmp"));
      const TiledMpi back = read_tmpi(path);
      CHECK(back.grid == t.grid);
      CHECK(back.max_planes == t.max_planes);
      CHECK(back.source_camera == t.source_camera);
      REQUIRE(back.tiles.size() == t.tiles.size());
      for (std::size_t i = 0; i < t.tiles.size(); ++i) {
        REQUIRE(back.tiles[i].planes.size() == t.tiles[i].planes.size());
        for (std::size_t j = 0; j < t.tiles[i].planes.size(); ++j) {
          const RgbaPlane& a = t.tiles[i].planes[j];
          const RgbaPlane& b = back.tiles[i].planes[j];
          CHECK(std::memcmp(&a.depth, &b.depth, sizeof(float)) == 0);
          CHECK(test::max_abs_diff(a.color, b.color) <= 0.5 / 255.0 + 1e-6);
          CHECK(test::max_abs_diff(a.alpha, b.alpha) <= 0.5 / 255.0 + 1e-6);
        }
      }
      const auto bytes = encode_tmpi(t);
      std::size_t expected = kTmpiHeaderBytes;
      for (const TileMpi& tile : t.tiles) expected += 10 + tile.planes.size() * (4 + 8 * 8 * 4);
      CHECK(bytes.size() == expected);
    }
  }

  TEST_CASE("golden bytes") {
    const auto golden = test::read_bytes(TMPI_TEST_DATA_DIR "/golden_small.tmpi");
    REQUIRE(golden.size() == 380);
    CHECK(encode_tmpi(test::golden_tmpi()) == golden);
    CHECK(encode_tmpi(decode_tmpi(golden)) == golden);
    CHECK(quantize_unit(1.0f) == 255);
    CHECK(quantize_unit(0.0f) == 0);
    CHECK(quantize_unit(0.5f) == 128);
  }

  TEST_CASE("TMPI decode errors are distinct") {
    const auto golden = encode_tmpi(test::golden_tmpi());

    auto bad_magic = golden;
    bad_magic[0] = 'X';
    CHECK(decode_error(bad_magic) == TmpiErrorCode::kBadMagic);

    auto bad_version = golden;
    bad_version[4] = 2;
    CHECK(decode_error(bad_version) == TmpiErrorCode::kVersionMismatch);

    long tile = -2;
    std::vector<std::uint8_t> cut(golden.begin(), golden.begin() + 156 + 78 + 20);
    CHECK(decode_error(cut, &tile) == TmpiErrorCode::kTruncated);
    CHECK(tile == 1);
    std::vector<std::uint8_t> header_only(golden.begin(), golden.begin() + 40);
    CHECK(decode_error(header_only, &tile) == TmpiErrorCode::kTruncated);
    CHECK(tile == -1);

    // Second tile depths 2.0, 3.25 -> swap to 3.25, 2.0.
    auto unsorted = golden;
    const std::size_t depth_at = 156 + 78 + 10;
    std::swap_ranges(unsorted.begin() + depth_at, unsorted.begin() + depth_at + 4,
                     unsorted.begin() + depth_at + 4);
    CHECK(decode_error(unsorted, &tile) == TmpiErrorCode::kInvariantViolation);
    CHECK(tile == 1);

    auto trailing = golden;
    trailing.push_back(0);
    CHECK(decode_error(trailing) == TmpiErrorCode::kInvariantViolation);

    auto wrong_count = golden;
    wrong_count[24] = 3;
    CHECK(decode_error(wrong_count) == TmpiErrorCode::kInvariantViolation);

    auto too_many_planes = golden;
    too_many_planes[156 + 8] = 3;
    CHECK(decode_error(too_many_planes, &tile) == TmpiErrorCode::kInvariantViolation);
    CHECK(tile == 0);

    CHECK_THROWS_AS(read_tmpi(scratch_dir() / "missing.tmpi"), TmpiFormatError);
  }

  TEST_CASE("color images") {
    std::mt19937_64 rng(52);
    const fs::path dir = scratch_dir();
    Raster r = test::random_raster(17, 9, 3, rng);
    for (float& v : r.data()) v = std::round(v * 255.0f) / 255.0f;
    r.at(0, 0, 0) = 1.0f;
    save_png(Image(r), dir / "rgb.png");
    const Image back = load_image(dir / "rgb.png");
    CHECK(back.at(0, 0, 0) == 1.0f);
    CHECK(test::max_abs_diff(back.raster(), r) < 1e-6);

    Raster r16 = test::random_raster(5, 4, 4, rng);
    for (float& v : r16.data()) v = std::round(v * 65535.0f) / 65535.0f;
    save_png(Image(r16), dir / "rgba16.png", 16);
    CHECK(test::max_abs_diff(load_image(dir / "rgba16.png").raster(), r16) < 1e-7);

    const std::string ppm = std::string("P6\n# comment\n2 1\n255\n") + std::string("\xff\x00\x80\x00\x00\x00", 6);
    write_text(dir / "tiny.ppm", ppm);
    const Image p = load_image(dir / "tiny.ppm");
    CHECK(p.channels() == 3);
    CHECK(p.at(0, 0, 0) == 1.0f);
    CHECK(p.at(0, 0, 2) == doctest::Approx(128.0 / 255.0));

    CHECK_THROWS_AS(load_image(dir / "nothing.png"), ImageIoError);
    write_text(dir / "img.bmp", "BM");
    CHECK_THROWS_AS(load_image(dir / "img.bmp"), ImageIoError);
    write_text(dir / "fake.png", "not a png at all");
    CHECK_THROWS_AS(load_image(dir / "fake.png"), ImageIoError);
  }

  TEST_CASE("depth loading") {
    const fs::path dir = scratch_dir();
    // 16-bit PGM: value 1000 at scale 0.001 is one meter.
    std::string pgm = "P5\n2 1\n65535\n";
    pgm += std::string("\x03\xe8\x07\xd0", 4);
    write_text(dir / "depth.pgm", pgm);
    const DepthLoadResult d = load_depth(dir / "depth.pgm", 0.001);
    CHECK(d.depth.at(0, 0) == doctest::Approx(1.0));
    CHECK(d.depth.at(1, 0) == doctest::Approx(2.0));
    CHECK(d.repaired == 0);

    // PFM round trip is bit exact.
    std::mt19937_64 rng(53);
    const Raster field = test::random_raster(13, 7, 1, rng, 0.5f, 9.0f);
    save_pfm(field, dir / "depth.pfm");
    CHECK(load_depth(dir / "depth.pfm").depth.raster() == field);

    // 30 isolated holes in 100x100 (0.3%), each filled from one of its neighbors.
    Raster holes(100, 100, 1);
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 100; ++x) holes.at(x, y) = 1.0f + 0.01f * x + 0.02f * y;
    }
    std::vector<std::pair<int, int>> spots;
    for (int i = 0; i < 30; ++i) spots.push_back({3 + (i % 6) * 15, 4 + (i / 6) * 18});
    for (auto [x, y] : spots) holes.at(x, y) = hole_value(x);
    save_pfm(holes, dir / "holes.pfm");
    const DepthLoadResult fixed = load_depth(dir / "holes.pfm");
    CHECK(fixed.repaired == 30);
    for (auto [x, y] : spots) {
      const float v = fixed.depth.at(x, y);
      const bool from_neighbor = v == holes.at(x - 1, y) || v == holes.at(x + 1, y) ||
                                 v == holes.at(x, y - 1) || v == holes.at(x, y + 1);
      CHECK(from_neighbor);
    }

    CHECK_THROWS_AS(repair_depth(Raster(3, 3, 1, 0.0f)), ImageIoError);
    CHECK_THROWS_AS(load_depth(dir / "depth.pgm", -1.0), ImageIoError);
  }

  TEST_CASE("camera files") {
    const std::string text =
        "# fx fy cx cy R t\n"
        "\n"
        "100 110 31.5 23.5 1 0 0 0 1 0 0 0 1 0.1 -0.2 0.3\n"
        "  200 200 0 0 0 -1 0 1 0 0 0 0 1 0 0 0\n";
    const auto cams = parse_cameras(text);
    REQUIRE(cams.size() == 2);
    CHECK(cams[0].fy() == 110.0);
    CHECK(cams[0].translation().y() == -0.2);
    CHECK(cams[1].rotation()(0, 1) == -1.0);

    CHECK_THROWS_AS(parse_cameras("1 2 3\n"), CameraFormatError);
    CHECK_THROWS_AS(parse_cameras("100 100 0 0 1 0 0 0 1 0 0 0 1.01 0 0 0\n"), CameraFormatError);
    CHECK_THROWS_AS(parse_cameras("100 100 0 0 1 0 0 0 1 0 0 0 1 0 0 x\n"), CameraFormatError);

    const auto snapped = parse_cameras("100 100 0 0 1 0.00002 0 0 1 0 0 0 1 0 0 0\n");
    CHECK(is_rotation(snapped[0].rotation(), 1e-12));

    std::mt19937_64 rng(54);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Camera> path;
    for (int i = 0; i < 5; ++i) {
      path.push_back(Camera(300 + u(rng), 300, 64 + u(rng), 48, Eigen::Matrix3d::Identity(),
                            Eigen::Vector3d(u(rng), u(rng), u(rng))));
    }
    const fs::path p = scratch_dir() / "path.txt";
    write_cameras(path, p);
    const auto back = read_cameras(p);
    REQUIRE(back.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(back[i] == path[i]);
  }
}
