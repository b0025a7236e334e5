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

#include "headblend/image_io.hpp"
#include "test_support.hpp"

using namespace headblend;

TEST_SUITE("image_io") {
  TEST_CASE("png round trips") {
    hbtest::Rng rng(1);
    hbtest::TempDir dir("png");
    const auto img = hbtest::random_image(rng, 13, 7);
    write_rgb_png(img, dir / "a.png");
    CHECK(read_rgb_png(dir / "a.png") == img);

    const GrayImage gray(5, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 250, 251, 252, 253, 255});
    write_gray_png(gray, dir / "g.png");
    CHECK(read_gray_png(dir / "g.png") == gray);
    // a gray PNG read as RGB replicates the channel
    const auto as_rgb = read_rgb_png(dir / "g.png");
    CHECK(as_rgb.pixel(10) == Rgb{250, 250, 250});

    const auto labels = hbtest::random_labels(rng, 9, 9, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    write_label_png(labels, dir / "l.png");
    CHECK(read_label_png(dir / "l.png") == labels);

    for (int w : {1, 7, 8, 9, 17}) {
      const auto mask = hbtest::random_mask(rng, w, 5, 0.5);
      write_mask_png(mask, dir / "m.png");
      CHECK(read_mask_png(dir / "m.png") == mask);
    }
  }

  TEST_CASE("masks are stored as 1-bit grayscale") {
    hbtest::TempDir dir("png-bits");
    write_mask_png(BinaryMask(16, 16, true), dir / "m.png");
    const auto bytes = hbtest::read_bytes(dir / "m.png");
    REQUIRE(bytes.size() > 26);
    // IHDR: bit depth at byte 24, colour type at byte 25
    CHECK(bytes[24] == 1);
    CHECK(bytes[25] == 0);
  }

  TEST_CASE("writes are deterministic") {
    hbtest::Rng rng(2);
    hbtest::TempDir dir("png-det");
    const auto img = hbtest::random_image(rng, 20, 20);
    write_rgb_png(img, dir / "a.png");
    write_rgb_png(img, dir / "b.png");
    CHECK(hbtest::read_bytes(dir / "a.png") == hbtest::read_bytes(dir / "b.png"));
  }

  TEST_CASE("read errors") {
    hbtest::TempDir dir("png-err");
    CHECK_THROWS_AS(read_rgb_png(dir / "missing.png"), IoError);
    hbtest::write_bytes(dir / "text.png", {'h', 'e', 'l', 'l', 'o', '!', '!', '!', '!'});
    CHECK_THROWS_AS(read_rgb_png(dir / "text.png"), InvalidArgument);

    hbtest::Rng rng(3);
    write_rgb_png(hbtest::random_image(rng, 4, 4), dir / "rgb.png");
    CHECK_THROWS_AS(read_label_png(dir / "rgb.png"), InvalidArgument);

    write_gray_png(GrayImage(2, 1, {3, 200}), dir / "bad_labels.png");
    try {
      read_label_png(dir / "bad_labels.png");
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      const std::string what = e.what();
      CHECK(what.find("invalid label") != std::string::npos);
      CHECK(what.find("bad_labels.png") != std::string::npos);
    }

    auto bytes = hbtest::read_bytes(dir / "rgb.png");
    bytes.resize(bytes.size() / 2);
    hbtest::write_bytes(dir / "cut.png", bytes);
    CHECK_THROWS_AS(read_rgb_png(dir / "cut.png"), InvalidArgument);
  }
}
