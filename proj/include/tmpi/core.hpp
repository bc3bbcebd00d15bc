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

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tmpi {

// Row-major float grid with interleaved channels. No range checks on values;
// the validated image types below wrap one of these.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, float fill = 0.0f);
  Raster(int width, int height, int channels, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  // Copies the w×h window whose top-left corner is (x0, y0).
  Raster crop(int x0, int y0, int w, int h) const;
  // Extracts a single channel as a one-channel raster.
  Raster channel(int c) const;

  bool same_shape(const Raster& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Color or scalar image with every value finite and in [0,1]; 1, 3 or 4 channels.
class Image {
 public:
  Image() = default;
  explicit Image(Raster raster);
  static Image filled(int width, int height, int channels, float value);

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  int channels() const { return raster_.channels(); }
  float at(int x, int y, int c = 0) const { return raster_.at(x, y, c); }
  const Raster& raster() const { return raster_; }

 private:
  Raster raster_;
};

// Metric depth, strictly positive and finite.
class DepthMap {
 public:
  DepthMap() = default;
  explicit DepthMap(Raster raster);

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  float at(int x, int y) const { return raster_.at(x, y); }
  const Raster& raster() const { return raster_; }

 private:
  Raster raster_;
};

// Per-pixel weights in [0,1].
class ConfidenceMap {
 public:
  ConfidenceMap() = default;
  explicit ConfidenceMap(Raster raster);
  static ConfidenceMap uniform(int width, int height);

  int width() const { return raster_.width(); }
  int height() const { return raster_.height(); }
  float at(int x, int y) const { return raster_.at(x, y); }
  const Raster& raster() const { return raster_; }

 private:
  Raster raster_;
};

// Pinhole camera. Extrinsics are world-to-camera: x_cam = R * x_world + t.
// Pixel centers sit at integer coordinates.
class Camera {
 public:
  Camera(double fx, double fy, double cx, double cy,
         const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity(),
         const Eigen::Vector3d& translation = Eigen::Vector3d::Zero());

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d center() const { return -rotation_.transpose() * translation_; }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation_ * world + translation_;
  }
  // Pixel coordinates of a world point; the point must be in front of the camera.
  Eigen::Vector2d project(const Eigen::Vector3d& world) const;

  // Same orientation and intrinsics, camera center moved by `offset` in world space.
  Camera moved_by(const Eigen::Vector3d& offset) const;

  friend bool operator==(const Camera& a, const Camera& b) {
    return a.fx_ == b.fx_ && a.fy_ == b.fy_ && a.cx_ == b.cx_ && a.cy_ == b.cy_ &&
           a.rotation_ == b.rotation_ && a.translation_ == b.translation_;
  }

 private:
  double fx_, fy_, cx_, cy_;
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Rigid transform taking source-camera coordinates to target-camera coordinates.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return rotation * x + translation;
  }
};

Eigen::Matrix3d intrinsics_matrix(const Camera& cam);

// Moves the principal point by (-dx, -dy) so that pixel (u, v) of the original
// camera becomes (u - dx, v - dy). Used to address a tile in its own frame.
Camera shift_principal_point(const Camera& cam, double dx, double dy);

Pose relative_pose(const Camera& source, const Camera& target);

// True when `r` is orthonormal with determinant +1 within `tol`.
bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-6);

}  // namespace tmpi
