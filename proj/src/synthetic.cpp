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

#include "headblend/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace headblend {

namespace {

// Uniform double in [0, 1) from the raw engine output; std distributions are
// implementation-defined, the engine is not.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : engine_(seed) {}
  double uniform() { return engine_() / 4294967296.0; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937 engine_;
};

std::uint32_t hash3(std::uint32_t x, std::uint32_t y, std::uint32_t seed) {
  std::uint32_t h = seed * 0x9E3779B9u ^ x * 0x85EBCA6Bu ^ y * 0xC2B2AE35u;
  h ^= h >> 16;
  h *= 0x7FEB352Du;
  h ^= h >> 15;
  h *= 0x846CA68Bu;
  h ^= h >> 16;
  return h;
}

// In [-1, 1].
double white_noise(int x, int y, std::uint32_t seed) {
  return hash3(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), seed) /
             2147483647.5 -
         1.0;
}

double smooth_noise(double x, double y, double cell, std::uint32_t seed) {
  const double gx = x / cell, gy = y / cell;
  const int x0 = static_cast<int>(std::floor(gx)), y0 = static_cast<int>(std::floor(gy));
  const double tx = gx - x0, ty = gy - y0;
  const double sx = tx * tx * (3 - 2 * tx), sy = ty * ty * (3 - 2 * ty);
  const double a = white_noise(x0, y0, seed), b = white_noise(x0 + 1, y0, seed);
  const double c = white_noise(x0, y0 + 1, seed), d = white_noise(x0 + 1, y0 + 1, seed);
  return (a * (1 - sx) + b * sx) * (1 - sy) + (c * (1 - sx) + d * sx) * sy;
}

using Color = std::array<double, 3>;

struct Ellipse {
  double cx, cy, rx, ry;
  // < 1 inside.
  double value(double x, double y) const {
    const double dx = (x - cx) / rx, dy = (y - cy) / ry;
    return dx * dx + dy * dy;
  }
  bool contains(double x, double y) const { return value(x, y) < 1.0; }
};

Color random_color(Rng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

Color scale(const Color& c, double s) { return {c[0] * s, c[1] * s, c[2] * s}; }

Color lerp(const Color& a, const Color& b, double t) {
  return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t};
}

}  // namespace

SyntheticPortrait make_synthetic_portrait(int size, std::uint32_t seed) {
  if (size < 16) throw InvalidArgument("synthetic portrait size must be >= 16");
  Rng rng(seed);
  const double s = size;

  const Color bg_top = random_color(rng, 40, 220);
  const Color bg_bottom = random_color(rng, 40, 220);
  const Color clothing = random_color(rng, 30, 200);
  const double tone = rng.uniform(0.55, 1.0);
  const Color skin = {225 * tone + rng.uniform(-10, 10), 180 * tone + rng.uniform(-10, 10),
                      150 * tone + rng.uniform(-10, 10)};
  const Color hair_color = random_color(rng, 20, 140);
  const Color iris = random_color(rng, 30, 120);
  const Color lip_color = {rng.uniform(150, 200), rng.uniform(60, 100), rng.uniform(70, 110)};
  const bool show_teeth = rng.uniform() < 0.5;

  const Ellipse face{s * rng.uniform(0.47, 0.53), s * rng.uniform(0.44, 0.48),
                     s * rng.uniform(0.22, 0.25), s * rng.uniform(0.28, 0.31)};
  const Ellipse hair{face.cx, face.cy - s * rng.uniform(0.03, 0.05), face.rx + s * 0.045,
                     face.ry + s * 0.05};
  const double hair_line = face.cy - face.ry * rng.uniform(0.45, 0.6);
  const double hair_side_limit = face.cy + face.ry * 0.2;
  const Ellipse body{s * 0.5, s * 1.08, s * rng.uniform(0.40, 0.46), s * 0.30};
  const double neck_half = face.rx * 0.42;
  const double eye_dx = face.rx * 0.4, eye_y = face.cy - face.ry * 0.12;
  const Ellipse left_eye{face.cx - eye_dx, eye_y, face.rx * 0.17, face.ry * 0.07};
  const Ellipse right_eye{face.cx + eye_dx, eye_y, face.rx * 0.17, face.ry * 0.07};
  const Ellipse left_brow{face.cx - eye_dx, eye_y - face.ry * 0.14, face.rx * 0.22, face.ry * 0.035};
  const Ellipse right_brow{face.cx + eye_dx, eye_y - face.ry * 0.14, face.rx * 0.22, face.ry * 0.035};
  const Ellipse nose{face.cx, face.cy + face.ry * 0.12, face.rx * 0.12, face.ry * 0.16};
  const Ellipse mouth{face.cx, face.cy + face.ry * 0.45, face.rx * 0.34, face.ry * 0.09};
  const double teeth_half = mouth.ry * 0.35;

  RgbImage image(size, size);
  std::vector<std::uint8_t> labels(image.pixel_count(), 0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      std::uint8_t label = 0;
      Color c = lerp(bg_top, bg_bottom, py / s);
      c = scale(c, 1.0 + 0.12 * smooth_noise(px, py, s / 6, seed ^ 0x11u));
      double grain = 6.0;

      if (body.contains(px, py)) {
        label = 12;
        c = scale(clothing, 1.0 + 0.1 * smooth_noise(px, py, s / 12, seed ^ 0x22u));
      }
      if (std::abs(px - face.cx) < neck_half && py > face.cy && py < body.cy - body.ry * 0.6) {
        label = 11;
        c = scale(skin, 0.8 + 0.05 * smooth_noise(px, py, s / 10, seed ^ 0x33u));
      }
      if (hair.contains(px, py) && (py < hair_side_limit)) {
        label = 10;
        c = scale(hair_color, 1.0 + 0.25 * smooth_noise(px, py, s / 40, seed ^ 0x44u));
        grain = 10.0;
      }
      if (face.contains(px, py) && !(label == 10 && py < hair_line)) {
        label = 1;
        // Lambert-like shading from the upper left.
        const double nx = (px - face.cx) / face.rx, ny = (py - face.cy) / face.ry;
        const double nz = std::sqrt(std::max(0.0, 1.0 - nx * nx - ny * ny));
        const double light = 0.55 + 0.45 * std::clamp(-0.4 * nx - 0.3 * ny + 0.85 * nz, 0.0, 1.0);
        c = scale(skin, light * (1.0 + 0.04 * smooth_noise(px, py, s / 16, seed ^ 0x55u)));
        grain = 4.0;
        if (left_brow.contains(px, py)) {
          label = 2;
          c = scale(hair_color, 0.9);
        } else if (right_brow.contains(px, py)) {
          label = 3;
          c = scale(hair_color, 0.9);
        } else if (left_eye.contains(px, py) || right_eye.contains(px, py)) {
          const Ellipse& e = left_eye.contains(px, py) ? left_eye : right_eye;
          label = left_eye.contains(px, py) ? 4 : 5;
          const double r = std::hypot((px - e.cx) / e.ry, (py - e.cy) / e.ry);
          c = r < 0.45 ? Color{20, 20, 25} : r < 0.95 ? iris : Color{235, 232, 228};
        } else if (nose.contains(px, py)) {
          label = 6;
          c = scale(c, 0.88 + 0.1 * (px - nose.cx) / nose.rx);
        } else if (mouth.contains(px, py)) {
          const double dy = py - mouth.cy;
          if (show_teeth && std::abs(dy) < teeth_half && mouth.value(px, py) < 0.7) {
            label = 9;
            c = {240, 238, 225};
          } else {
            label = dy < 0 ? 7 : 8;
            c = scale(lip_color, dy < 0 ? 0.85 : 1.0);
          }
        }
      }
      const double g = grain * white_noise(x, y, seed ^ 0x66u);
      const std::size_t i = static_cast<std::size_t>(y) * size + x;
      image.set_pixel(i, {static_cast<std::uint8_t>(std::clamp(std::lround(c[0] + g), 0L, 255L)),
                          static_cast<std::uint8_t>(std::clamp(std::lround(c[1] + g), 0L, 255L)),
                          static_cast<std::uint8_t>(std::clamp(std::lround(c[2] + g), 0L, 255L))});
      labels[i] = label;
    }
  }
  return {std::move(image), LabelMap(size, size, std::move(labels))};
}

}  // namespace headblend
