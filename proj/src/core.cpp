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

#include "tmpi/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace tmpi {

namespace {

void check_shape(int width, int height, int channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw std::invalid_argument("raster dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height) +
                                "x" + std::to_string(channels));
  }
}

}  // namespace

Raster::Raster(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Raster::Raster(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw std::invalid_argument("raster data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height) + "x" + std::to_string(channels));
  }
}

Raster Raster::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || x0 + w > width_ || y0 + h > height_) {
    throw std::out_of_range("crop window outside raster");
  }
  Raster out(w, h, channels_);
  const std::size_t row = static_cast<std::size_t>(w) * channels_;
  for (int y = 0; y < h; ++y) {
    const float* src = &data_[(static_cast<std::size_t>(y0 + y) * width_ + x0) * channels_];
    std::copy(src, src + row, out.data_.begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

Raster Raster::channel(int c) const {
  if (c < 0 || c >= channels_) throw std::out_of_range("channel index out of range");
  Raster out(width_, height_, 1);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.at(x, y) = at(x, y, c);
  }
  return out;
}

Image::Image(Raster raster) : raster_(std::move(raster)) {
  const int c = raster_.channels();
  if (c != 1 && c != 3 && c != 4) {
    throw std::invalid_argument("image must have 1, 3 or 4 channels, got " +
                                std::to_string(c));
  }
  for (float v : raster_.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw std::invalid_argument("image value outside [0,1]: " + std::to_string(v));
    }
  }
}

Image Image::filled(int width, int height, int channels, float value) {
  return Image(Raster(width, height, channels, value));
}

DepthMap::DepthMap(Raster raster) : raster_(std::move(raster)) {
  if (raster_.channels() != 1) throw std::invalid_argument("depth map must be single-channel");
  for (float v : raster_.data()) {
    if (!std::isfinite(v) || v <= 0.0f) {
      throw std::invalid_argument("depth must be positive and finite, got " +
                                  std::to_string(v));
    }
  }
}

ConfidenceMap::ConfidenceMap(Raster raster) : raster_(std::move(raster)) {
  if (raster_.channels() != 1) {
    throw std::invalid_argument("confidence map must be single-channel");
  }
  for (float v : raster_.data()) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw std::invalid_argument("confidence outside [0,1]: " + std::to_string(v));
    }
  }
}

ConfidenceMap ConfidenceMap::uniform(int width, int height) {
  return ConfidenceMap(Raster(width, height, 1, 1.0f));
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Camera::Camera(double fx, double fy, double cx, double cy, const Eigen::Matrix3d& rotation,
               const Eigen::Vector3d& translation)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), rotation_(rotation), translation_(translation) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw std::invalid_argument("focal lengths must be positive and finite");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy) || !translation.allFinite()) {
    throw std::invalid_argument("camera parameters must be finite");
  }
  if (!is_rotation(rotation)) {
    throw std::invalid_argument("camera rotation is not orthonormal with det +1");
  }
}

Eigen::Vector2d Camera::project(const Eigen::Vector3d& world) const {
  const Eigen::Vector3d p = to_camera(world);
  return {fx_ * p.x() / p.z() + cx_, fy_ * p.y() / p.z() + cy_};
}

Camera Camera::moved_by(const Eigen::Vector3d& offset) const {
  return Camera(fx_, fy_, cx_, cy_, rotation_, translation_ - rotation_ * offset);
}

Eigen::Matrix3d intrinsics_matrix(const Camera& cam) {
  Eigen::Matrix3d k;
  k << cam.fx(), 0.0, cam.cx(),  //
      0.0, cam.fy(), cam.cy(),   //
      0.0, 0.0, 1.0;
  return k;
}

Camera shift_principal_point(const Camera& cam, double dx, double dy) {
  return Camera(cam.fx(), cam.fy(), cam.cx() - dx, cam.cy() - dy, cam.rotation(),
                cam.translation());
}

Pose relative_pose(const Camera& source, const Camera& target) {
  // x_s = R_s x_w + t_s  =>  x_w = R_s^T (x_s - t_s)
  // x_t = R_t R_s^T x_s + (t_t - R_t R_s^T t_s)
  Pose pose;
  pose.rotation = target.rotation() * source.rotation().transpose();
  pose.translation = target.translation() - pose.rotation * source.translation();
  return pose;
}

}  // namespace tmpi
