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
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "tmpi/mpigen.hpp"

namespace tmpi::test {

// Same byte pattern as tests/data/make_golden.py.
inline int golden_code(int tile, int plane, int x, int y, int c) {
  if (c == 3) return (x + y + plane) % 2 == 0 ? 255 : (17 * tile + 5 * x) % 256;
  return (31 * tile + 11 * plane + 7 * x + 3 * y + 50 * c) % 256;
}

inline TiledMpi golden_tmpi() {
  Eigen::Vector3d t(0.5, 0.0, -1.0);
  TiledMpi tmpi{make_grid(6, 4, 4, 2), {}, 2, Camera(4.0, 4.5, 2.5, 1.5, Eigen::Matrix3d::Identity(), t)};
  const std::vector<std::vector<float>> depths = {{1.5f}, {2.0f, 3.25f}};
  for (int i = 0; i < 2; ++i) {
    TileMpi tile;
    tile.origin = tmpi.grid.origin(i);
    for (int j = 0; j < static_cast<int>(depths[i].size()); ++j) {
      RgbaPlane p{Raster(4, 4, 3), Raster(4, 4, 1), depths[i][j]};
      for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
          for (int c = 0; c < 3; ++c) p.color.at(x, y, c) = golden_code(i, j, x, y, c) / 255.0f;
          p.alpha.at(x, y) = golden_code(i, j, x, y, 3) / 255.0f;
        }
      }
      tile.planes.push_back(p);
    }
    tmpi.tiles.push_back(tile);
  }
  return tmpi;
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace tmpi::test
