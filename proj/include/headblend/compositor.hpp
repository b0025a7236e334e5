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

#ifndef HEADBLEND_COMPOSITOR_HPP_
#define HEADBLEND_COMPOSITOR_HPP_

#include "headblend/types.hpp"

namespace headblend {

// Transfers chroma from the head-colour reference onto the grayscale head.
// Per head pixel with a valid reference: BT.601 YCbCr of the reference with
// Y replaced by the gray value. Head pixels without a reference stay gray;
// pixels outside the head are black.
RgbImage recolor_head(const GrayImage& gray_head, const ReferenceImage& head_reference,
                      const BinaryMask& head);

// Band pixels take the inpainting reference where it is valid. The others
// copy the nearest candidate: a valid band pixel or a background pixel
// (outside `cut_region`), ties broken by the smaller linear index. Pixels
// outside the band are black.
RgbImage fill_inpainting(const ReferenceImage& inpaint_reference, const BinaryMask& band,
                         const RgbImage& background, const BinaryMask& cut_region);

// Layers background < band fill < head. With feather > 0 each layer edge
// gets a linear ramp `feather` pixels wide centred on the edge: a layer
// pixel at distance d from the nearest pixel outside it has alpha
// min(1, 1/2 + (d - 1/2) / feather) over the lower colour there, and a band
// pixel at distance d from the head takes max(0, 1/2 - (d - 1/2) / feather)
// of the nearest head colour. Pixels outside head | band are copied from
// `background` untouched, so the outer edge only has its inner half.
RgbImage composite(const RgbImage& head_colors, const RgbImage& band_fill,
                   const RgbImage& background, const BinaryMask& head, const BinaryMask& band,
                   int feather);

}  // namespace headblend

#endif  // HEADBLEND_COMPOSITOR_HPP_
