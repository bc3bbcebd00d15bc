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

#include "tmpi/core.hpp"

namespace tmpi {

struct Metrics {
  double psnr = 0.0;  // dB; meaningless when psnr_infinite is set
  bool psnr_infinite = false;
  double ssim = 0.0;
  double l1 = 0.0;
};

// Pixels within floor(crop_fraction * size) of each border are excluded.
struct CropWindow {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};
CropWindow crop_window(int width, int height, double crop_fraction);

// PSNR with peak 1, SSIM with an 11x11 Gaussian window (sigma 1.5,
// C1 = 0.01², C2 = 0.03²) averaged over channels, and mean absolute error.
// Both images must have the same shape.
Metrics compute_metrics(const Image& a, const Image& b, double crop_fraction = 0.15);

}  // namespace tmpi
