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


#include <doctest.h>

#include <cmath>

#include "headblend/metrics.hpp"
#include "test_support.hpp"

using namespace headblend;

namespace {

GrayImage constant_gray(int w, int h, std::uint8_t v) {
  return GrayImage(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v));
}

RgbImage add_noise(const RgbImage& img, int amplitude, hbtest::Rng& rng) {
  RgbImage out = img;
  for (auto& v : out.data()) {
    v = static_cast<std::uint8_t>(std::clamp(v + hbtest::uniform_int(rng, -amplitude, amplitude), 0, 255));
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("psnr values") {
    hbtest::Rng rng(1);
    const auto img = hbtest::uniform_image(8, 8, {100, 100, 100});
    CHECK(psnr(img, img) == kPsnrCap);
    const auto off = hbtest::uniform_image(8, 8, {101, 101, 101});
    CHECK(std::abs(psnr(img, off) - 48.13) <= 0.01);
    CHECK(psnr(img, off) == doctest::Approx(20 * std::log10(255.0)).epsilon(1e-12));

    RgbImage a(2, 2), b(2, 2);
    b.set_pixel(3, {0, 255, 0});
    CHECK(psnr(a, b) == doctest::Approx(10 * std::log10(12.0)).epsilon(1e-12));
    CHECK(std::abs(psnr(a, b) - 10.79) < 0.005);
    CHECK(psnr(a, b) == psnr(b, a));

    BinaryMask m(2, 2);
    m.set(std::size_t{3});
    CHECK(psnr(a, b, m) == doctest::Approx(10 * std::log10(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(psnr(a, b, BinaryMask(2, 2)), InvalidArgument);
    CHECK_THROWS_AS(psnr(a, RgbImage(2, 3)), InvalidArgument);
  }

  TEST_CASE("psnr decreases with noise amplitude") {
    hbtest::Rng rng(2);
    const auto img = hbtest::uniform_image(32, 32, {128, 128, 128});
    double previous = kPsnrCap + 1;
    for (int amplitude : {1, 4, 16, 64}) {
      hbtest::Rng noise(99);
      const double p = psnr(img, add_noise(img, amplitude, noise));
      CHECK(p < previous);
      previous = p;
    }
  }

  TEST_CASE("ssim identities and closed forms") {
    hbtest::Rng rng(3);
    const auto a = to_gray(hbtest::random_image(rng, 24, 20));
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    const double c1 = 6.5025;
    for (auto [p, q] : {std::pair{10, 200}, std::pair{0, 255}, std::pair{90, 91}}) {
      const double expected = (2.0 * p * q + c1) / (double(p) * p + double(q) * q + c1);
      CHECK(std::abs(ssim(constant_gray(16, 16, p), constant_gray(16, 16, q)) - expected) <= 1e-9);
    }

    auto shifted = a;
    for (auto& v : shifted.data()) v = static_cast<std::uint8_t>((v + 128) % 256);
    const double s = ssim(a, shifted);
    CHECK(s < 0.5);
    CHECK(s == doctest::Approx(hbtest::oracle_ssim(a, shifted)).epsilon(1e-9));

    for (int trial = 0; trial < 10; ++trial) {
      const auto x = to_gray(hbtest::random_image(rng, 15, 13));
      const auto y = to_gray(add_noise(hbtest::random_image(rng, 15, 13), 30, rng));
      CHECK(ssim(x, y) == doctest::Approx(hbtest::oracle_ssim(x, y)).epsilon(1e-9));
      CHECK(ssim(x, y) == doctest::Approx(ssim(y, x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ssim(constant_gray(10, 20, 0), constant_gray(10, 20, 0)), InvalidArgument);
    CHECK_THROWS_AS(ssim(constant_gray(11, 11, 0), constant_gray(12, 11, 0)), InvalidArgument);
  }

  TEST_CASE("l1 masked") {
    RgbImage a(4, 1), b(4, 1);
    const BinaryMask full(4, 1, true);
    CHECK(l1_masked(a, a, full) == 0.0);
    CHECK(l1_masked(a, hbtest::uniform_image(4, 1, {255, 255, 255}), full) == 1.0);
    b.set_pixel(0, {51, 51, 51});
    b.set_pixel(1, {51, 51, 51});
    CHECK(l1_masked(a, b, full) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(l1_masked(a, b, full) == l1_masked(b, a, full));
    CHECK_THROWS_AS(l1_masked(a, b, BinaryMask(4, 1)), InvalidArgument);
  }
}
