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

#include "tmpi/camera_io.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tmpi/tmpi_file.hpp"

namespace tmpi {

namespace {

constexpr double kOrthonormalTolerance = 1e-4;

}  // namespace

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

std::vector<Camera> parse_cameras(const std::string& text) {
  std::vector<Camera> cameras;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> v;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw CameraFormatError("line " + std::to_string(line_no) + ": bad number '" + token + "'");
      }
    }
    if (v.size() != 16) {
      throw CameraFormatError("line " + std::to_string(line_no) + ": expected 16 numbers, got " +
                              std::to_string(v.size()));
    }
    Eigen::Matrix3d r;
    r << v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12];
    const double err = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!(err <= kOrthonormalTolerance) || r.determinant() <= 0.0) {
      throw CameraFormatError("line " + std::to_string(line_no) + ": rotation is not orthonormal");
    }
    // Keep exact matrices bit-identical; only snap ones that drifted.
    if (!is_rotation(r, 1e-12)) r = orthonormalize(r);
    try {
      cameras.emplace_back(v[0], v[1], v[2], v[3], r, Eigen::Vector3d(v[13], v[14], v[15]));
    } catch (const std::exception& e) {
      throw CameraFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cameras;
}

std::vector<Camera> read_cameras(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CameraFormatError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<Camera> cameras = parse_cameras(buffer.str());
  if (cameras.empty()) throw CameraFormatError(path.string() + " contains no cameras");
  return cameras;
}

std::string format_camera(const Camera& c) {
  std::string out;
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!out.empty()) out.push_back(' ');
    out += buf;
  };
  put(c.fx());
  put(c.fy());
  put(c.cx());
  put(c.cy());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) put(c.rotation()(i, j));
  }
  for (int i = 0; i < 3; ++i) put(c.translation()(i));
  return out;
}

void write_cameras(const std::vector<Camera>& cameras, const std::filesystem::path& path) {
  std::string text;
  for (const Camera& c : cameras) text += format_camera(c) + "\n";
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace tmpi
