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

#include "headblend/compositor.hpp"
#include "headblend/preprocessing.hpp"
#include "test_support.hpp"

using namespace headblend;

namespace {

ReferenceImage full_reference(const RgbImage& colors, const BinaryMask& valid) {
  ReferenceImage r = ReferenceImage::empty(colors.size());
  for (auto p : valid.indices()) {
    r.colors.set_pixel(p, colors.pixel(p));
    r.valid.set(p);
  }
  return r;
}

// Centred disc of the given radius.
BinaryMask disc(int w, int h, double radius) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - (w - 1) / 2.0, dy = y - (h - 1) / 2.0;
      if (dx * dx + dy * dy <= radius * radius) m.set(x, y);
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("compositor") {
  TEST_CASE("recolor head") {
    hbtest::Rng rng(1);
    const auto img = hbtest::random_image(rng, 16, 16);
    const auto head = hbtest::random_mask(rng, 16, 16, 0.6);
    const auto gray = grayscale_head(img, head);
    const auto out = recolor_head(gray, full_reference(img, head), head);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      if (!head.test(i)) {
        CHECK(out.pixel(i) == Rgb{0, 0, 0});
        continue;
      }
      for (int k = 0; k < 3; ++k) CHECK(std::abs(int(out.pixel(i)[k]) - int(img.pixel(i)[k])) <= 2);
    }

    const auto grey_ref = full_reference(hbtest::uniform_image(16, 16, {77, 77, 77}), head);
    const auto flat = recolor_head(gray, grey_ref, head);
    for (auto p : head.indices()) CHECK(flat.pixel(p) == Rgb{gray[p], gray[p], gray[p]});

    const auto none = recolor_head(gray, ReferenceImage::empty({16, 16}), head);
    for (auto p : head.indices()) CHECK(none.pixel(p) == Rgb{gray[p], gray[p], gray[p]});
  }

  TEST_CASE("fill inpainting") {
    hbtest::Rng rng(2);
    const auto band = hbtest::random_mask(rng, 12, 12, 0.3);
    const auto colors = hbtest::random_image(rng, 12, 12);
    const auto background = hbtest::random_image(rng, 12, 12);
    const auto cut = band.united(hbtest::random_mask(rng, 12, 12, 0.3));
    const auto all_valid = fill_inpainting(full_reference(colors, band), band, background, cut);
    for (std::size_t i = 0; i < 144; ++i) {
      CHECK(all_valid.pixel(i) == (band.test(i) ? colors.pixel(i) : Rgb{0, 0, 0}));
    }

    // no valid band pixel, uniform grey background
    const auto grey = hbtest::uniform_image(12, 12, {90, 90, 90});
    const auto filled = fill_inpainting(ReferenceImage::empty({12, 12}), band, grey, cut);
    for (auto p : band.indices()) CHECK(filled.pixel(p) == Rgb{90, 90, 90});

    // a single invalid pixel next to a valid one
    BinaryMask b2(5, 1);
    b2.set(1, 0);
    b2.set(2, 0);
    auto ref = ReferenceImage::empty({5, 1});
    ref.colors.set_pixel(1, {1, 2, 3});
    ref.valid.set(std::size_t{1});
    const auto one = fill_inpainting(ref, b2, hbtest::uniform_image(5, 1, {200, 0, 0}), BinaryMask(5, 1, true));
    CHECK(one.pixel(2) == Rgb{1, 2, 3});

    // ties resolve to the smaller linear index
    BinaryMask b3(3, 1);
    b3.set(std::size_t{1});
    RgbImage bg(3, 1);
    bg.set_pixel(0, {10, 0, 0});
    bg.set_pixel(2, {20, 0, 0});
    const auto tie = fill_inpainting(ReferenceImage::empty({3, 1}), b3, bg, b3);
    CHECK(tie.pixel(1) == Rgb{10, 0, 0});
  }

  TEST_CASE("composite with feather 0 is a hard paste") {
    hbtest::Rng rng(3);
    const auto head_colors = hbtest::random_image(rng, 14, 14);
    const auto band_fill = hbtest::random_image(rng, 14, 14);
    const auto background = hbtest::random_image(rng, 14, 14);
    const auto head = disc(14, 14, 4);
    const auto band = dilate(head, 2).minus(head);
    const auto out = composite(head_colors, band_fill, background, head, band, 0);
    for (std::size_t i = 0; i < 196; ++i) {
      const Rgb want = head.test(i) ? head_colors.pixel(i)
                       : band.test(i) ? band_fill.pixel(i) : background.pixel(i);
      CHECK(out.pixel(i) == want);
    }
  }

  TEST_CASE("composite invariants for any feather") {
    hbtest::Rng rng(4);
    for (int trial = 0; trial < 40; ++trial) {
      const int w = hbtest::uniform_int(rng, 8, 24), h = hbtest::uniform_int(rng, 8, 24);
      const auto head = disc(w, h, hbtest::uniform_real(rng, 1.5, 5.0));
      const auto cut = dilate(head.united(hbtest::random_mask(rng, w, h, 0.05)), hbtest::uniform_int(rng, 1, 3));
      const auto band = cut.minus(head);
      const auto head_colors = hbtest::random_image(rng, w, h);
      const auto band_fill = hbtest::random_image(rng, w, h);
      const auto target = hbtest::random_image(rng, w, h);
      const auto background = background_cutout(target, cut);
      const int feather = hbtest::uniform_int(rng, 0, 6);
      const auto out = composite(head_colors, band_fill, background, head, band, feather);
      for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        if (!cut.test(i)) {
          CHECK(out.pixel(i) == target.pixel(i));
          continue;
        }
        // convex combination of the candidate colours present in the frame
        for (int k = 0; k < 3; ++k) {
          int hi = 0;
          for (std::size_t j = 0; j < out.pixel_count(); ++j) {
            hi = std::max({hi, int(head_colors.pixel(j)[k]), int(band_fill.pixel(j)[k]),
                           int(background.pixel(j)[k])});
          }
          CHECK(out.pixel(i)[k] <= hi + 1);
        }
      }
    }
  }

  TEST_CASE("composite of equal layers is uniform") {
    const auto c = hbtest::uniform_image(16, 16, {30, 60, 90});
    const auto head = disc(16, 16, 4);
    const auto cut = dilate(head, 3);
    const auto band = cut.minus(head);
    RgbImage bg = c;
    for (auto p : cut.indices()) bg.set_pixel(p, {0, 0, 0});
    for (int feather : {0, 1, 3, 7}) {
      // background inside the cut is black; the outer ramp only reads pixels
      // outside the cut, which carry the shared colour
      CHECK(composite(c, c, bg, head, band, feather) == c);
    }
  }

  TEST_CASE("feather ramps across the head edge") {
    // one row: band | head, edge between x=3 and x=4
    BinaryMask head(8, 1), band(8, 1);
    for (int x = 4; x < 8; ++x) head.set(x, 0);
    for (int x = 0; x < 4; ++x) band.set(x, 0);
    const auto top = hbtest::uniform_image(8, 1, {200, 200, 200});
    const auto under = hbtest::uniform_image(8, 1, {100, 100, 100});
    const RgbImage bg(8, 1);
    const auto out = composite(top, under, bg, head, band, 4);
    // alpha inside: 1/2 + (d - 1/2)/4 -> 0.625, 0.875, 1
    CHECK(out.pixel(4)[0] == 163);  // 100 + 0.625 * 100 = 162.5
    CHECK(out.pixel(5)[0] == 188);
    CHECK(out.pixel(6)[0] == 200);
    // band side: 1/2 - (d - 1/2)/4 -> 0.375, 0.125, 0
    CHECK(out.pixel(3)[0] == 138);  // 100 + 0.375 * 100 = 137.5
    CHECK(out.pixel(2)[0] == 113);
    CHECK(out.pixel(1)[0] == 100);
    CHECK(out.pixel(0)[0] == 100);
    CHECK_THROWS_AS(composite(top, under, bg, head, band, -1), InvalidArgument);
  }
}
