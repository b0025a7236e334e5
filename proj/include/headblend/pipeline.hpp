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

// File-level commands: preprocess a parsed pair into a bundle, build colour
// references, run the whole swap, benchmark correlation memory and report
// cycle losses.

#ifndef HEADBLEND_PIPELINE_HPP_
#define HEADBLEND_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "headblend/correspondence.hpp"
#include "headblend/features.hpp"
#include "headblend/preprocessing.hpp"
#include "headblend/types.hpp"

namespace headblend {

// Ordered UTF-8 `key = value` lines. Blank lines and lines starting with '#'
// are ignored when parsing.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Config keys: tau, epsilon, dilate_target, dilate_union, feather, fallback,
// feature_levels, patch_radius. Throws InvalidArgument for unknown keys or
// unparsable values.
void apply_config_entry(BlenderConfig& config, std::string_view key, std::string_view value);
BlenderConfig load_config(const std::filesystem::path& path, BlenderConfig base = {});
// Resolved values (radii for `image_height`) as `config.*` entries.
void record_config(KeyValueDocument& doc, const BlenderConfig& config, int image_height);

struct FeatureSource {
  enum class Kind { kPyramid, kFile };
  Kind kind = Kind::kPyramid;
  std::filesystem::path animated;
  std::filesystem::path target;

  // "pyramid" or "file:ANIMATED.fmap,TARGET.fmap".
  static FeatureSource parse(std::string_view spec);
  std::string describe() const;
};

struct PairPaths {
  std::filesystem::path animated_image;
  std::filesystem::path animated_labels;
  std::filesystem::path target_image;
  std::filesystem::path target_labels;
};

struct PairInputs {
  RgbImage animated;
  LabelMap animated_labels;
  RgbImage target;
  LabelMap target_labels;
};

// Reads and validates the four files; errors name the offending file.
PairInputs load_pair(const PairPaths& paths);

std::string sha256_file_hex(const std::filesystem::path& path);

// Animated image as seen by the feature extractor: the animated head, the
// target background outside the dilated union, and the band filled from the
// nearest background pixel.
RgbImage animated_context_image(const RgbImage& animated, const PreprocessResult& pre);

struct ReferencePair {
  ReferenceImage head;
  ReferenceImage inpaint;
};

ReferencePair create_references(const PairInputs& pair, const PreprocessResult& pre,
                                const BlenderConfig& config, const FeatureSource& features);

struct SwapResult {
  PreprocessResult pre;
  ReferencePair refs;
  RgbImage recolored_head;
  RgbImage band_fill;
  RgbImage blended;
};

// preprocess -> features -> references -> recolour -> fill -> composite.
// Errors carry the failing stage as a prefix.
SwapResult swap_images(const PairInputs& pair, const BlenderConfig& config,
                       const FeatureSource& features);

// Bundle layout written by run_preprocess / run_refs.
namespace bundle {
inline constexpr std::string_view kManifest = "manifest.txt";
inline constexpr std::string_view kAnimatedHead = "animated_head_mask.png";
inline constexpr std::string_view kTargetHead = "target_head_mask.png";
inline constexpr std::string_view kAnimatedInpaint = "animated_inpaint_mask.png";
inline constexpr std::string_view kTargetInpaint = "target_inpaint_mask.png";
inline constexpr std::string_view kDilatedUnion = "dilated_union_mask.png";
inline constexpr std::string_view kGrayHead = "gray_head.png";
inline constexpr std::string_view kBackground = "background.png";
inline constexpr std::string_view kHeadReference = "head_reference.png";
inline constexpr std::string_view kHeadReferenceValid = "head_reference_valid.png";
inline constexpr std::string_view kInpaintReference = "inpaint_reference.png";
inline constexpr std::string_view kInpaintReferenceValid = "inpaint_reference_valid.png";
inline constexpr std::string_view kRecoloredHead = "recolored_head.png";
inline constexpr std::string_view kBandFill = "band_fill.png";
}  // namespace bundle

void run_preprocess(const PairPaths& paths, const BlenderConfig& config,
                    const std::filesystem::path& out_dir);
void run_refs(const std::filesystem::path& bundle_dir, const FeatureSource& features,
              const BlenderConfig& config);
// Writes the blended image to `output`; with `keep_intermediates` every
// intermediate goes to `<output stem>_intermediates/` beside it.
void run_swap(const PairPaths& paths, const BlenderConfig& config, const FeatureSource& features,
              const std::filesystem::path& output, bool keep_intermediates);

struct BenchOptions {
  enum class Layout { kRandom, kPortrait };
  std::vector<int> sizes = {32, 64};
  std::vector<double> fractions = {0.3};
  int regions = 6;
  int repetitions = 1;
  std::uint32_t seed = 1;
  Layout layout = Layout::kRandom;
  std::size_t naive_pixel_cap = kDefaultNaivePixelCap;
  // Block-sparse arm is skipped above this many predicted entries.
  std::uint64_t block_entry_cap = std::uint64_t{1} << 27;
};

struct BenchRow {
  int size = 0;
  double fraction = 0.0;  // ignored for the portrait layout
  std::string layout;
  std::uint64_t naive_entries = 0;
  std::optional<std::uint64_t> naive_measured;  // unset: skipped(cap)
  std::optional<double> naive_ms;
  std::uint64_t predicted_entries = 0;
  std::optional<std::uint64_t> measured_entries;  // unset: skipped(cap)
  std::optional<double> block_ms;
  std::optional<double> ratio;  // naive / predicted
  bool counts_match = true;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool all_match() const;
  std::string to_text() const;
  std::string to_kv() const;
};

// Label map with round(fraction * size^2) labelled pixels spread over
// `regions` (1..6) label-defined regions at random positions.
LabelMap synthetic_region_labels(int size, double fraction, int regions, std::uint32_t seed);

BenchReport run_bench(const BenchOptions& options);

struct CycleCheckResult {
  double tau = 0.0;
  std::optional<CycleReport> primary;  // unset: empty cycle domain everywhere
  bool has_cross = false;
  std::optional<CycleReport> cross;
  std::string to_text() const;
  std::string to_kv() const;
};

CycleCheckResult run_cycle_check(const PairPaths& paths,
                                 const std::optional<std::pair<std::filesystem::path,
                                                               std::filesystem::path>>& second,
                                 const FeatureSource& features, const BlenderConfig& config);

}  // namespace headblend

#endif  // HEADBLEND_PIPELINE_HPP_
