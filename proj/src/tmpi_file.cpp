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

#include "tmpi/tmpi_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace tmpi {

namespace {

class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u16(std::uint16_t v) { little(v, 2); }
  void u32(std::uint32_t v) { little(v, 4); }
  void f32(float v) { little(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { little(std::bit_cast<std::uint64_t>(v), 8); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  void little(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void set_tile(long tile) { tile_ = tile; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void need(std::size_t n) const {
    if (remaining() < n) {
      const std::string where =
          tile_ < 0 ? std::string("header") : "tile " + std::to_string(tile_);
      throw TmpiFormatError(TmpiErrorCode::kTruncated,
                            "truncated TMPI data in " + where + ": need " + std::to_string(n) +
                                " bytes, have " + std::to_string(remaining()),
                            tile_);
    }
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(little(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(little(4))); }
  double f64() { return std::bit_cast<double>(little(8)); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::uint64_t little(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  long tile_ = -1;
};

[[noreturn]] void invariant(const std::string& message, long tile = -1) {
  throw TmpiFormatError(TmpiErrorCode::kInvariantViolation, message, tile);
}

}  // namespace

const char* to_string(TmpiErrorCode code) {
  switch (code) {
    case TmpiErrorCode::kIo: return "io";
    case TmpiErrorCode::kBadMagic: return "bad-magic";
    case TmpiErrorCode::kVersionMismatch: return "version-mismatch";
    case TmpiErrorCode::kTruncated: return "truncated";
    case TmpiErrorCode::kInvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

std::uint8_t quantize_unit(float value) {
  const float clamped = std::isfinite(value) ? std::fmin(std::fmax(value, 0.0f), 1.0f) : 0.0f;
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

std::vector<std::uint8_t> encode_tmpi(const TiledMpi& tmpi) {
  const TileGrid& grid = tmpi.grid;
  const int h = grid.tile_size();
  if (tmpi.tiles.size() != grid.tile_count()) {
    throw std::invalid_argument("TMPI tile count does not match its grid");
  }
  if (tmpi.max_planes < 1 || tmpi.max_planes > 0xFFFF) {
    throw std::invalid_argument("max plane count out of range");
  }
  ByteWriter w;
  std::size_t planes = 0;
  for (const auto& t : tmpi.tiles) planes += t.planes.size();
  w.reserve(kTmpiHeaderBytes + tmpi.tiles.size() * 10 + planes * (4 + 4 * h * h));

  w.bytes(kTmpiMagic, 4);
  w.u16(kTmpiVersion);
  w.u32(static_cast<std::uint32_t>(grid.image_width()));
  w.u32(static_cast<std::uint32_t>(grid.image_height()));
  w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(grid.stride()));
  w.u16(static_cast<std::uint16_t>(tmpi.max_planes));
  w.u32(static_cast<std::uint32_t>(tmpi.tiles.size()));
  const Camera& cam = tmpi.source_camera;
  for (double v : {cam.fx(), cam.fy(), cam.cx(), cam.cy()}) w.f64(v);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) w.f64(cam.rotation()(r, c));
  }
  for (int i = 0; i < 3; ++i) w.f64(cam.translation()(i));

  for (std::size_t i = 0; i < tmpi.tiles.size(); ++i) {
    const TileMpi& tile = tmpi.tiles[i];
    const TileOrigin expected = grid.origin(i);
    if (!(tile.origin == expected)) {
      throw std::invalid_argument("tile " + std::to_string(i) + " origin does not match grid");
    }
    if (tile.planes.empty() || tile.planes.size() > static_cast<std::size_t>(tmpi.max_planes)) {
      throw std::invalid_argument("tile " + std::to_string(i) + " has an invalid plane count");
    }
    w.u32(static_cast<std::uint32_t>(tile.origin.x));
    w.u32(static_cast<std::uint32_t>(tile.origin.y));
    w.u16(static_cast<std::uint16_t>(tile.planes.size()));
    float previous = 0.0f;
    for (const RgbaPlane& plane : tile.planes) {
      if (!(plane.depth > previous) || !std::isfinite(plane.depth)) {
        throw std::invalid_argument("tile " + std::to_string(i) +
                                    " plane depths are not strictly increasing");
      }
      previous = plane.depth;
      w.f32(plane.depth);
    }
    for (const RgbaPlane& plane : tile.planes) {
      if (plane.color.width() != h || plane.color.height() != h || plane.color.channels() != 3 ||
          plane.alpha.width() != h || plane.alpha.height() != h) {
        throw std::invalid_argument("tile " + std::to_string(i) + " plane has the wrong size");
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < h; ++x) {
          for (int c = 0; c < 3; ++c) w.u8(quantize_unit(plane.color.at(x, y, c)));
          w.u8(quantize_unit(plane.alpha.at(x, y)));
        }
      }
    }
  }
  return w.take();
}

TiledMpi decode_tmpi(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kTmpiMagic, 4) != 0) {
    throw TmpiFormatError(TmpiErrorCode::kBadMagic,
                          "not a TMPI file (magic '" +
                              std::string(reinterpret_cast<const char*>(magic.data()), 4) + "')");
  }
  const std::uint16_t version = r.u16();
  if (version != kTmpiVersion) {
    throw TmpiFormatError(TmpiErrorCode::kVersionMismatch,
                          "unsupported TMPI version " + std::to_string(version) + " (expected " +
                              std::to_string(kTmpiVersion) + ")");
  }
  const std::uint32_t width = r.u32();
  const std::uint32_t height = r.u32();
  const std::uint32_t tile_size = r.u32();
  const std::uint32_t stride = r.u32();
  const std::uint16_t max_planes = r.u16();
  const std::uint32_t tile_count = r.u32();
  double cam[16];
  for (double& v : cam) v = r.f64();

  constexpr std::uint32_t kMaxSide = 1u << 20;
  if (width == 0 || height == 0 || width > kMaxSide || height > kMaxSide) {
    invariant("image size out of range");
  }
  TileGrid grid;
  try {
    grid = make_grid(static_cast<int>(width), static_cast<int>(height),
                     static_cast<int>(tile_size), static_cast<int>(stride));
  } catch (const std::invalid_argument& e) {
    invariant(std::string("invalid tile grid: ") + e.what());
  }
  if (tile_count != grid.tile_count()) {
    invariant("tile count " + std::to_string(tile_count) + " does not match grid (" +
              std::to_string(grid.tile_count()) + ")");
  }
  if (max_planes == 0) invariant("max plane count is zero");

  Eigen::Matrix3d rotation;
  for (int i = 0; i < 9; ++i) rotation(i / 3, i % 3) = cam[4 + i];
  const Eigen::Vector3d translation(cam[13], cam[14], cam[15]);
  std::optional<Camera> camera;
  try {
    camera.emplace(cam[0], cam[1], cam[2], cam[3], rotation, translation);
  } catch (const std::invalid_argument& e) {
    invariant(std::string("invalid source camera: ") + e.what());
  }

  TiledMpi tmpi{grid, {}, max_planes, *camera};
  tmpi.tiles.reserve(tile_count);
  const int h = static_cast<int>(tile_size);
  const std::size_t plane_bytes = static_cast<std::size_t>(h) * h * 4;
  for (std::uint32_t i = 0; i < tile_count; ++i) {
    const long idx = static_cast<long>(i);
    r.set_tile(idx);
    TileMpi tile;
    tile.origin.x = static_cast<int>(r.u32());
    tile.origin.y = static_cast<int>(r.u32());
    if (!(tile.origin == grid.origin(i))) invariant("tile origin does not match grid", idx);
    const std::uint16_t k = r.u16();
    if (k == 0 || k > max_planes) {
      invariant("tile plane count " + std::to_string(k) + " outside [1, " +
                    std::to_string(max_planes) + "]",
                idx);
    }
    r.need(static_cast<std::size_t>(k) * 4);
    float previous = 0.0f;
    for (int j = 0; j < k; ++j) {
      const float d = r.f32();
      if (!std::isfinite(d) || !(d > previous)) {
        invariant("plane depths must be positive and strictly increasing", idx);
      }
      previous = d;
      tile.planes.push_back({Raster(h, h, 3), Raster(h, h, 1), d});
    }
    r.need(plane_bytes * k);
    for (auto& plane : tile.planes) {
      const auto px = r.take(plane_bytes);
      std::size_t p = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < h; ++x) {
          for (int c = 0; c < 3; ++c) plane.color.at(x, y, c) = px[p++] / 255.0f;
          plane.alpha.at(x, y) = px[p++] / 255.0f;
        }
      }
    }
    tmpi.tiles.push_back(std::move(tile));
  }
  r.set_tile(-1);
  if (r.remaining() != 0) {
    invariant(std::to_string(r.remaining()) + " trailing bytes after the last tile");
  }
  return tmpi;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw TmpiFormatError(TmpiErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw TmpiFormatError(TmpiErrorCode::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw TmpiFormatError(TmpiErrorCode::kIo, "cannot move " + tmp.string() + " to " + path.string());
  }
}

void write_tmpi(const TiledMpi& tmpi, const std::filesystem::path& path) {
  write_file_atomic(path, encode_tmpi(tmpi));
}

TiledMpi read_tmpi(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TmpiFormatError(TmpiErrorCode::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_tmpi(bytes);
}

}  // namespace tmpi
