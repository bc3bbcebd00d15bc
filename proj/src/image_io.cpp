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

#include "tmpi/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tmpi/tmpi_file.hpp"

namespace tmpi {

namespace {

// Decoded integer raster before normalization.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int max_value = 255;
  std::vector<double> values;
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void png_error_handler(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
  if (buffer) *buffer = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

RawImage read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ImageIoError("cannot open " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw ImageIoError(path.string() + " is not a PNG file");
  }

  std::string message;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError("libpng initialization failed");
  }

  RawImage raw;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ImageIoError("PNG decode error in " + path.string() + ": " + message);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  raw.max_value = depth == 16 ? 65535 : 255;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * raw.height);
  rows.resize(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = buffer.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
  raw.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    raw.values[i] = depth == 16 ? (buffer[2 * i] << 8) | buffer[2 * i + 1] : buffer[i];
  }
  return raw;
}

// Binary PGM (P5) or PPM (P6).
RawImage read_pnm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_all(path);
  std::size_t pos = 0;
  auto token = [&]() {
    std::string t;
    while (pos < bytes.size()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
        ++pos;
      } else {
        t.push_back(c);
        ++pos;
      }
    }
    return t;
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P6") throw ImageIoError(path.string() + ": unsupported PNM type");
  RawImage raw;
  try {
    raw.width = std::stoi(token());
    raw.height = std::stoi(token());
    raw.max_value = std::stoi(token());
  } catch (const std::exception&) {
    throw ImageIoError(path.string() + ": malformed PNM header");
  }
  if (raw.width <= 0 || raw.height <= 0 || raw.max_value <= 0 || raw.max_value > 65535) {
    throw ImageIoError(path.string() + ": malformed PNM header");
  }
  ++pos;  // single whitespace before the raster
  raw.channels = magic == "P5" ? 1 : 3;
  const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
  const std::size_t sample_bytes = raw.max_value > 255 ? 2 : 1;
  if (bytes.size() < pos + count * sample_bytes) throw ImageIoError(path.string() + ": truncated");
  raw.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    raw.values[i] = sample_bytes == 2 ? (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]
                                      : bytes[pos + i];
  }
  return raw;
}

Raster read_pfm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_all(path);
  std::string header;
  std::size_t pos = 0;
  int lines = 0;
  while (pos < bytes.size() && lines < 3) {
    if (bytes[pos] == '\n') ++lines;
    header.push_back(static_cast<char>(bytes[pos++]));
  }
  std::istringstream in(header);
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "Pf") throw ImageIoError(path.string() + ": only single-channel PFM is supported");
  if (width <= 0 || height <= 0) throw ImageIoError(path.string() + ": malformed PFM header");
  const bool little = scale < 0.0;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < pos + count * 4) throw ImageIoError(path.string() + ": truncated PFM");
  Raster out(width, height, 1);
  for (int row = 0; row < height; ++row) {
    // PFM stores rows bottom to top.
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* p = &bytes[pos + (static_cast<std::size_t>(row) * width + x) * 4];
      const std::uint32_t bits =
          little ? (p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24))
                 : (p[3] | (p[2] << 8) | (p[1] << 16) | (static_cast<std::uint32_t>(p[0]) << 24));
      out.at(x, y) = std::bit_cast<float>(bits);
    }
  }
  return out;
}

RawImage read_integer_raster(const std::filesystem::path& path) {
  const std::string ext = extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw ImageIoError("unsupported image format: " + path.string());
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  RawImage raw = read_integer_raster(path);
  // Gray+alpha becomes RGBA.
  const int out_channels = raw.channels == 2 ? 4 : raw.channels;
  Raster out(raw.width, raw.height, out_channels);
  const double norm = 1.0 / raw.max_value;
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const std::size_t p = (static_cast<std::size_t>(y) * raw.width + x) * raw.channels;
      if (raw.channels == 2) {
        const float g = static_cast<float>(raw.values[p] * norm);
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = g;
        out.at(x, y, 3) = static_cast<float>(raw.values[p + 1] * norm);
      } else {
        for (int c = 0; c < raw.channels; ++c) {
          out.at(x, y, c) = static_cast<float>(raw.values[p + c] * norm);
        }
      }
    }
  }
  return Image(std::move(out));
}

DepthLoadResult repair_depth(Raster raw) {
  if (raw.channels() != 1) throw ImageIoError("depth must be single-channel");
  const int w = raw.width();
  const int h = raw.height();
  auto data = raw.data();
  std::vector<char> valid(data.size());
  std::deque<std::size_t> queue;
  for (std::size_t p = 0; p < data.size(); ++p) {
    valid[p] = std::isfinite(data[p]) && data[p] > 0.0f;
    if (valid[p]) queue.push_back(p);
  }
  const std::size_t invalid = data.size() - queue.size();
  if (queue.empty()) throw ImageIoError("depth map has no valid pixels");
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(p % w);
    const int y = static_cast<int>(p / w);
    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
      const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
      if (valid[q]) continue;
      valid[q] = 1;
      data[q] = data[p];
      queue.push_back(q);
    }
  }
  return {DepthMap(std::move(raw)), invalid};
}

DepthLoadResult load_depth(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ImageIoError("depth scale must be positive");
  if (extension(path) == ".pfm") {
    Raster r = read_pfm(path);
    if (scale != 1.0) {
      for (float& v : r.data()) v = static_cast<float>(v * scale);
    }
    return repair_depth(std::move(r));
  }
  const RawImage raw = read_integer_raster(path);
  if (raw.channels != 1) throw ImageIoError(path.string() + ": depth image must be single-channel");
  Raster r(raw.width, raw.height, 1);
  auto data = r.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(raw.values[i] * scale);
  return repair_depth(std::move(r));
}

void save_png(const Image& image, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ImageIoError("PNG bit depth must be 8 or 16");
  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  const int color_type = ch == 1 ? PNG_COLOR_TYPE_GRAY
                         : ch == 3 ? PNG_COLOR_TYPE_RGB
                                   : PNG_COLOR_TYPE_RGB_ALPHA;
  const int bytes_per = bit_depth / 8;
  std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * ch * bytes_per);
  const auto data = image.raster().data();
  const double max_value = bit_depth == 16 ? 65535.0 : 255.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = static_cast<std::uint32_t>(std::lround(data[i] * max_value));
    if (bit_depth == 16) {
      buffer[2 * i] = static_cast<png_byte>(v >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
    } else {
      buffer[i] = static_cast<png_byte>(v);
    }
  }
  std::vector<png_bytep> rows(h);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * ch * bytes_per;
  for (int y = 0; y < h; ++y) rows[y] = buffer.data() + row_bytes * y;

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    FilePtr fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw ImageIoError("cannot open " + tmp.string() + " for writing");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler,
                                              png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
      png_destroy_write_struct(&png, &info);
      throw ImageIoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw ImageIoError("PNG encode error: " + message);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ImageIoError("cannot move " + tmp.string() + " to " + path.string());
}

void save_pfm(const Raster& raster, const std::filesystem::path& path) {
  if (raster.channels() != 1) throw ImageIoError("PFM writer expects a single-channel raster");
  std::string header = "Pf\n" + std::to_string(raster.width()) + " " +
                       std::to_string(raster.height()) + "\n-1.0\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (int row = 0; row < raster.height(); ++row) {
    const int y = raster.height() - 1 - row;
    for (int x = 0; x < raster.width(); ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(raster.at(x, y));
      for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
    }
  }
  write_file_atomic(path, bytes);
}

}  // namespace tmpi
