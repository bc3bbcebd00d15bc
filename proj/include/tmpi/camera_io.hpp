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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmpi/core.hpp"

namespace tmpi {

class CameraFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One camera per line: fx fy cx cy r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz.
// Blank lines and lines starting with '#' are skipped. Rotations must be
// orthonormal within 1e-4; they are snapped to the nearest rotation.
std::vector<Camera> parse_cameras(const std::string& text);
std::vector<Camera> read_cameras(const std::filesystem::path& path);

std::string format_camera(const Camera& camera);
void write_cameras(const std::vector<Camera>& cameras, const std::filesystem::path& path);

// Nearest orthonormal matrix with determinant +1.
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m);

}  // namespace tmpi
