// Copyright 2026 The headblend Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "headblend/metrics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "headblend/preprocessing.hpp"

namespace headblend {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Valid-region separable filter: output is (w-10) x (h-10).
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h) {
  static const auto taps = gaussian_taps();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> horizontal(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * in[static_cast<std::size_t>(y) * w + x + k];
      horizontal[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        s += taps[k] * horizontal[static_cast<std::size_t>(y + k) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

double psnr_from_sse(double sse, std::size_t samples) {
  if (sse == 0.0) return kPsnrCap;
  const double mse = sse / static_cast<double>(samples);
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

}  // namespace

double psnr(const RgbImage& a, const RgbImage& b) {
  require_same_size(a.size(), b.size(), "psnr");
  double sse = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - db[i];
    sse += d * d;
  }
  return psnr_from_sse(sse, da.size());
}

double psnr(const RgbImage& a, const RgbImage& b, const BinaryMask& mask) {
  require_same_size(a.size(), b.size(), "psnr");
  require_same_size(a.size(), mask.size(), "psnr mask");
  double sse = 0.0;
  std::size_t samples = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    if (!mask.test(i)) continue;
    const Rgb pa = a.pixel(i);
    const Rgb pb = b.pixel(i);
    for (int k = 0; k < 3; ++k) {
      const double d = static_cast<double>(pa[k]) - pb[k];
      sse += d * d;
    }
    samples += 3;
  }
  if (samples == 0) throw InvalidArgument("psnr: empty mask");
  return psnr_from_sse(sse, samples);
}

double ssim(const GrayImage& a, const GrayImage& b) {
  require_same_size(a.size(), b.size(), "ssim");
  const int w = a.width();
  const int h = a.height();
  if (w < kWindow || h < kWindow) {
    throw InvalidArgument("ssim: image " + to_string(a.size()) + " smaller than the 11x11 window");
  }
  const std::size_t n = a.pixel_count();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a[i];
    y[i] = b[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h);
  const auto my = filter_valid(y, w, h);
  const auto sxx = filter_valid(xx, w, h);
  const auto syy = filter_valid(yy, w, h);
  const auto sxy = filter_valid(xy, w, h);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mx.size());
}

double l1_masked(const RgbImage& a, const RgbImage& b, const BinaryMask& mask) {
  require_same_size(a.size(), b.size(), "l1_masked");
  require_same_size(a.size(), mask.size(), "l1_masked mask");
  double sum = 0.0;
  std::size_t pixels = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    if (!mask.test(i)) continue;
    const Rgb pa = a.pixel(i);
    const Rgb pb = b.pixel(i);
    for (int k = 0; k < 3; ++k) sum += std::abs(static_cast<int>(pa[k]) - static_cast<int>(pb[k]));
    ++pixels;
  }
  if (pixels == 0) throw InvalidArgument("l1_masked: empty mask");
  return sum / (255.0 * 3.0 * static_cast<double>(pixels));
}

GrayImage to_gray(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) out[i] = luminance(image.pixel(i));
  return out;
}

}  // namespace headblend
