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

#include "tmpi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tmpi {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  const double mid = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-(i - mid) * (i - mid) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable "valid" filtering of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int w, int h) {
  // Small crops fall back to the largest odd window that fits.
  int size = std::min({kSsimWindow, w, h});
  if (size % 2 == 0) --size;
  const std::vector<double> k = gaussian_kernel(size, kSsimSigma);
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h, k);
  const auto mu_b = filter_valid(b, w, h, k);
  const auto s_aa = filter_valid(aa, w, h, k);
  const auto s_bb = filter_valid(bb, w, h, k);
  const auto s_ab = filter_valid(ab, w, h, k);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = s_aa[i] - ma * ma;
    const double vb = s_bb[i] - mb * mb;
    const double cov = s_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
             ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace

CropWindow crop_window(int width, int height, double crop_fraction) {
  if (!(crop_fraction >= 0.0 && crop_fraction < 0.5)) {
    throw std::invalid_argument("crop fraction must be in [0, 0.5)");
  }
  const int mx = static_cast<int>(std::floor(crop_fraction * width + 1e-9));
  const int my = static_cast<int>(std::floor(crop_fraction * height + 1e-9));
  CropWindow c{mx, my, width - 2 * mx, height - 2 * my};
  if (c.width <= 0 || c.height <= 0) throw std::invalid_argument("crop leaves no pixels");
  return c;
}

Metrics compute_metrics(const Image& a, const Image& b, double crop_fraction) {
  if (!a.raster().same_shape(b.raster())) {
    throw std::invalid_argument("metric inputs differ in size or channel count");
  }
  const CropWindow c = crop_window(a.width(), a.height(), crop_fraction);
  const int channels = a.channels();
  const std::size_t pixels = static_cast<std::size_t>(c.width) * c.height;

  Metrics m;
  double sq = 0.0;
  double abs_sum = 0.0;
  double ssim_sum = 0.0;
  std::vector<double> pa(pixels), pb(pixels);
  for (int ch = 0; ch < channels; ++ch) {
    for (int y = 0; y < c.height; ++y) {
      for (int x = 0; x < c.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * c.width + x;
        pa[i] = a.at(c.x0 + x, c.y0 + y, ch);
        pb[i] = b.at(c.x0 + x, c.y0 + y, ch);
        const double d = pa[i] - pb[i];
        sq += d * d;
        abs_sum += std::abs(d);
      }
    }
    ssim_sum += ssim_plane(pa, pb, c.width, c.height);
  }
  const double count = static_cast<double>(pixels) * channels;
  const double mse = sq / count;
  m.l1 = abs_sum / count;
  m.ssim = ssim_sum / channels;
  if (mse == 0.0) {
    m.psnr_infinite = true;
    m.psnr = std::numeric_limits<double>::infinity();
  } else {
    m.psnr = 10.0 * std::log10(1.0 / mse);
  }
  return m;
}

}  // namespace tmpi
