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

#ifndef HEADBLEND_METRICS_HPP_
#define HEADBLEND_METRICS_HPP_

#include "headblend/types.hpp"

namespace headblend {

inline constexpr double kPsnrCap = 99.0;

// 10 log10(255^2 / MSE) over all pixels and channels; identical inputs give
// kPsnrCap.
double psnr(const RgbImage& a, const RgbImage& b);
// Same, restricted to the set pixels of `mask`. Throws on an empty mask.
double psnr(const RgbImage& a, const RgbImage& b, const BinaryMask& mask);

// Mean SSIM over all 11x11 windows (Gaussian sigma 1.5, K1 0.01, K2 0.03,
// L 255). Both sides must be at least 11 pixels.
double ssim(const GrayImage& a, const GrayImage& b);

// Mean |a - b| / 255 over masked pixels and channels.
double l1_masked(const RgbImage& a, const RgbImage& b, const BinaryMask& mask);

GrayImage to_gray(const RgbImage& image);

}  // namespace headblend

#endif  // HEADBLEND_METRICS_HPP_
