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

// Semantic-region restricted correspondence.
//
// Correlation is only computed between pixels that carry the same semantic
// region in the animated and target frames, so one region costs
// N_animated x N_target entries instead of (w*h)^2 for the full frame.
// Each block row is normalised with a temperature softmax and used to pull
// target colours into the animated geometry.

#ifndef HEADBLEND_CORRESPONDENCE_HPP_
#define HEADBLEND_CORRESPONDENCE_HPP_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "headblend/features.hpp"
#include "headblend/types.hpp"

namespace headblend {

// Process-wide count of correlation entries currently held by
// CorrelationBlock and FullCorrelation storage, and the high-water mark.
class CorrelationMemory {
 public:
  static std::uint64_t current() { return current_.load(); }
  static std::uint64_t peak() { return peak_.load(); }
  // Sets the peak to the current count.
  static void reset_peak() { peak_.store(current_.load()); }

  static void record_allocate(std::size_t n);
  static void record_deallocate(std::size_t n) { current_.fetch_sub(n); }

 private:
  static inline std::atomic<std::uint64_t> current_{0};
  static inline std::atomic<std::uint64_t> peak_{0};
};

template <class T>
struct CountingAllocator {
  using value_type = T;

  CountingAllocator() = default;
  template <class U>
  CountingAllocator(const CountingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    CorrelationMemory::record_allocate(n);
    return p;
  }
  void deallocate(T* p, std::size_t n) noexcept {
    CorrelationMemory::record_deallocate(n);
    std::allocator<T>{}.deallocate(p, n);
  }

  template <class U>
  bool operator==(const CountingAllocator<U>&) const noexcept {
    return true;
  }
};

using CorrelationStorage = std::vector<double, CountingAllocator<double>>;

// Cosine similarities between the animated pixels of one region (rows) and
// the target pixels of the same region (columns). Row-major.
struct CorrelationBlock {
  RegionIndex rows;
  RegionIndex cols;
  CorrelationStorage values;

  Region region() const { return rows.region(); }
  std::size_t row_count() const { return rows.size(); }
  std::size_t col_count() const { return cols.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * col_count() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * col_count(), col_count()};
  }
};

// Softmax weights of one animated pixel over the region's target pixels.
struct AttentionRow {
  std::uint32_t source = 0;
  std::vector<double> weights;
};

// <a, b> / (max(|a|, eps) * max(|b|, eps)), clamped to [-1, 1].
double cosine_similarity(std::span<const float> a, std::span<const float> b, double epsilon);

// Writes softmax(scores / tau) into `weights`, using max subtraction.
void softmax(std::span<const double> scores, double tau, std::span<double> weights);

// Both maps must already be centralized. Allocates exactly
// rows.size() * cols.size() entries.
CorrelationBlock region_correlation(const FeatureMap& animated, const FeatureMap& target,
                                    const RegionIndex& rows, const RegionIndex& cols,
                                    double epsilon);

AttentionRow attention_row(const CorrelationBlock& block, std::size_t row, double tau);

// Colour at every row pixel = softmax-weighted sum of target colours over the
// block's columns. Valid mask = the row pixels (empty if there are no
// columns).
ReferenceImage softmax_warp(const CorrelationBlock& block, const RgbImage& target, double tau);

// Reverse direction: colour at every column pixel = softmax over the rows of
// Gamma(., v) applied to `source` colours at the row pixels.
ReferenceImage softmax_warp_transposed(const CorrelationBlock& block, const RgbImage& source,
                                       double tau);

// softmax_warp(region_correlation(...)) computed one row at a time, so only
// O(cols) scratch is live. Results are bitwise identical.
ReferenceImage warp_region(const FeatureMap& animated, const FeatureMap& target,
                           const RegionIndex& rows, const RegionIndex& cols,
                           const RgbImage& target_colors, double tau, double epsilon);

// softmax_warp_transposed(region_correlation(...)) computed one column at a
// time. Bitwise identical to the materialised path.
ReferenceImage warp_region_transposed(const FeatureMap& animated, const FeatureMap& target,
                                      const RegionIndex& rows, const RegionIndex& cols,
                                      const RgbImage& source_colors, double tau, double epsilon);

// Head-colour reference: one warp per label-defined region (face, hair, eye,
// nose, lip, tooth). Regions whose target side is empty are skipped or
// re-correlated against all target head pixels according to the fallback.
ReferenceImage create_head_color_reference(const FeatureMap& animated,
                                           const LabelMap& animated_labels,
                                           const FeatureMap& target, const LabelMap& target_labels,
                                           const RgbImage& target_colors,
                                           const BlenderConfig& config);

// Inpainting reference: a single block from the animated band to the target
// band. With the global-head fallback an empty target band falls back to
// `fallback_cols` when provided.
ReferenceImage create_inpainting_reference(const FeatureMap& animated,
                                           const BinaryMask& animated_band,
                                           const FeatureMap& target, const BinaryMask& target_band,
                                           const RgbImage& target_colors,
                                           const BlenderConfig& config,
                                           const BinaryMask* fallback_cols = nullptr);

struct CycleResult {
  ReferenceImage cycled;  // in the target geometry
  double loss = 0.0;      // mean |cycled - compare_to| / 255 over valid pixels
  std::size_t pixels = 0;
};

// Warps `forward` (colours at each block's rows) back through the transposed
// blocks and compares with `compare_to`. Throws EmptyDomain when no pixel is
// covered.
CycleResult cycle_warp_and_loss(std::span<const CorrelationBlock> blocks,
                                const ReferenceImage& forward, const RgbImage& compare_to,
                                double tau);

struct RegionCycleLoss {
  Region region = Region::kFace;
  std::size_t pixels = 0;
  std::optional<double> loss;  // unset: empty cycle domain
};

struct CycleReport {
  std::vector<RegionCycleLoss> regions;
  double aggregate = 0.0;  // pixel-weighted over all regions
  std::size_t pixels = 0;
};

// Per-region cycle: target -> animated -> target, using streamed warps.
// `target_colors` are warped; the cycled result is compared with
// `compare_to`. Bands, when both given, add the inpainting region. Throws
// EmptyDomain if every region is empty.
CycleReport cycle_check(const FeatureMap& animated, const LabelMap& animated_labels,
                        const FeatureMap& target, const LabelMap& target_labels,
                        const RgbImage& target_colors, const RgbImage& compare_to,
                        const BlenderConfig& config, const BinaryMask* animated_band = nullptr,
                        const BinaryMask* target_band = nullptr);

// L_c for the pair (animated, target).
CycleReport cycle_consistency(const FeatureMap& animated, const LabelMap& animated_labels,
                              const FeatureMap& target, const LabelMap& target_labels,
                              const RgbImage& target_colors, const BlenderConfig& config);

// L_c' : warp from a second target T' to the animated frame and back, and
// compare with the original target T at the same positions.
CycleReport cross_pair_cycle_loss(const FeatureMap& animated, const LabelMap& animated_labels,
                                  const FeatureMap& second_target,
                                  const LabelMap& second_labels,
                                  const RgbImage& second_colors, const RgbImage& original_target,
                                  const BlenderConfig& config);

// Per row pixel: the total softmax weight it distributes (1 for any
// non-empty block) scaled to 255; pixels outside the rows stay 0.
GrayImage accumulated_attention(const CorrelationBlock& block, double tau);

inline constexpr std::size_t kDefaultNaivePixelCap = 64 * 64;

// Dense (w*h) x (w*h) cosine matrix, the baseline that region blocks reduce.
struct FullCorrelation {
  Size frame;
  CorrelationStorage values;

  std::size_t pixels() const { return frame.pixel_count(); }
  double at(std::size_t u, std::size_t v) const { return values[u * pixels() + v]; }
};

// Throws CapExceeded when w*h exceeds `pixel_cap`.
FullCorrelation naive_full_correlation(const FeatureMap& animated, const FeatureMap& target,
                                       double epsilon,
                                       std::size_t pixel_cap = kDefaultNaivePixelCap);

struct RegionEntries {
  Region region = Region::kFace;
  std::uint64_t animated = 0;
  std::uint64_t target = 0;
  std::uint64_t entries() const { return animated * target; }
};

struct MemoryReport {
  Size frame;
  std::uint64_t naive_entries = 0;
  std::uint64_t restricted_entries = 0;
  std::optional<double> ratio;  // unset when restricted_entries == 0
  std::optional<std::uint64_t> measured_peak_entries;
  std::vector<RegionEntries> regions;

  std::string to_text() const;
  std::string to_kv() const;
};

// Predicted entry counts. Regions are paired by name; a region missing on
// one side contributes nothing.
MemoryReport memory_report(std::span<const RegionIndex> animated,
                           std::span<const RegionIndex> target, Size frame);

// Computes every paired block and keeps them all alive.
std::vector<CorrelationBlock> correlate_regions(const FeatureMap& animated,
                                                const FeatureMap& target,
                                                std::span<const RegionIndex> animated_regions,
                                                std::span<const RegionIndex> target_regions,
                                                double epsilon);

// memory_report plus an instrumented correlate_regions run whose peak entry
// count is stored in measured_peak_entries.
MemoryReport measured_memory_report(const FeatureMap& animated, const FeatureMap& target,
                                    std::span<const RegionIndex> animated_regions,
                                    std::span<const RegionIndex> target_regions, double epsilon);

// Index of every label-defined region of a label map.
std::vector<RegionIndex> label_regions(const LabelMap& labels);

}  // namespace headblend

#endif  // HEADBLEND_CORRESPONDENCE_HPP_
