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

#ifndef HEADBLEND_SYNTHETIC_HPP_
#define HEADBLEND_SYNTHETIC_HPP_

#include <cstdint>

#include "headblend/types.hpp"

namespace headblend {

struct SyntheticPortrait {
  RgbImage image;
  LabelMap labels;
};

// Procedural head-and-shoulders portrait with its 13-label parse: textured
// background, body, neck, shaded skin, hair, brows, eyes, nose, lips and
// (for some seeds) teeth. The same (size, seed) always yields identical
// pixels. Size must be at least 16.
SyntheticPortrait make_synthetic_portrait(int size, std::uint32_t seed);

}  // namespace headblend

#endif  // HEADBLEND_SYNTHETIC_HPP_
