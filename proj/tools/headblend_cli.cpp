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


// headblend command-line tool. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "headblend/headblend.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

// Carries a library status up to main.
struct Failure {
  hb_status status;
  std::string message;
};

void check(hb_status status, const std::string& context = {}) {
  if (status == HB_OK) return;
  std::string message = hb_last_error_message();
  if (!context.empty()) message = context + ": " + message;
  throw Failure{status, std::move(message)};
}

using ConfigPtr = std::unique_ptr<hb_config, decltype(&hb_config_destroy)>;
using ReportPtr = std::unique_ptr<hb_report, decltype(&hb_report_destroy)>;

struct ConfigFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> tau;
  std::optional<std::string> epsilon;
  std::optional<std::string> dilate_target;
  std::optional<std::string> dilate_union;
  std::optional<std::string> feather;
  std::optional<std::string> fallback;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Key-value config file; flags override it");
    cmd->add_option("--tau", tau, "Softmax temperature (> 0)");
    cmd->add_option("--epsilon", epsilon, "Cosine denominator guard (> 0)");
    cmd->add_option("--dilate-target", dilate_target, "Target head dilation radius in pixels");
    cmd->add_option("--dilate-union", dilate_union, "Head union dilation radius in pixels");
    cmd->add_option("--feather", feather, "Feather ramp width in pixels");
    cmd->add_option("--fallback", fallback, "Empty target region policy")
        ->check(CLI::IsMember({"skip", "global-head"}));
  }

  ConfigPtr build() const {
    hb_config* raw = nullptr;
    check(hb_config_create(&raw));
    ConfigPtr config(raw, hb_config_destroy);
    if (config_path) check(hb_config_load(config.get(), config_path->c_str()));
    const std::pair<const char*, const std::optional<std::string>*> flags[] = {
        {"tau", &tau},         {"epsilon", &epsilon},   {"dilate_target", &dilate_target},
        {"dilate_union", &dilate_union}, {"feather", &feather}, {"fallback", &fallback},
    };
    for (const auto& [key, value] : flags) {
      if (*value) check(hb_config_set(config.get(), key, (*value)->c_str()));
    }
    check(hb_config_validate(config.get()));
    return config;
  }
};

struct PairFlags {
  std::string animated_image;
  std::string animated_labels;
  std::string target_image;
  std::string target_labels;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--animated", animated_image, "Animated portrait PNG")->required();
    cmd->add_option("--animated-labels", animated_labels, "Animated label map PNG")->required();
    cmd->add_option("--target", target_image, "Target image PNG")->required();
    cmd->add_option("--target-labels", target_labels, "Target label map PNG")->required();
  }

  hb_pair_paths paths() const {
    return {animated_image.c_str(), animated_labels.c_str(), target_image.c_str(),
            target_labels.c_str()};
  }
};

void print_report(const hb_report* report, const std::string& format) {
  std::cout << (format == "kv" ? hb_report_kv(report) : hb_report_text(report));
  std::cout.flush();
}

int exit_code_for(hb_status status) {
  return status == HB_ERROR_INTERNAL ? kExitInternal : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"headblend: semantic head blending toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hb_version()));

  ConfigFlags config_flags;
  PairFlags pair_flags;
  std::string out_dir, bundle_dir, output, features = "pyramid", format = "text";
  bool keep_intermediates = false;

  auto* preprocess = app.add_subcommand("preprocess", "Compute masks, gray head and background");
  pair_flags.add_to(preprocess);
  config_flags.add_to(preprocess);
  preprocess->add_option("--out", out_dir, "Bundle directory")->required();

  auto* refs = app.add_subcommand("refs", "Build head-colour and inpainting references");
  refs->add_option("--bundle", bundle_dir, "Bundle directory from preprocess")->required();
  refs->add_option("--features", features, "pyramid or file:ANIMATED.fmap,TARGET.fmap");
  config_flags.add_to(refs);

  auto* swap = app.add_subcommand("swap", "Run the whole pipeline and write the blended image");
  pair_flags.add_to(swap);
  config_flags.add_to(swap);
  swap->add_option("--features", features, "pyramid or file:ANIMATED.fmap,TARGET.fmap");
  swap->add_option("--output", output, "Blended PNG")->required();
  swap->add_flag("--keep-intermediates", keep_intermediates,
                 "Also write every intermediate to <output stem>_intermediates/");

  std::vector<int> sizes = {32, 64};
  std::vector<double> fractions = {0.3};
  int regions = 6, repetitions = 1;
  std::uint32_t seed = 1;
  std::size_t naive_cap = 0;
  std::string layout = "random";
  auto* bench = app.add_subcommand("bench", "Correlation memory: naive vs region blocks");
  bench->add_option("--sizes", sizes, "Square frame sizes")->delimiter(',');
  bench->add_option("--fractions", fractions, "Labelled pixel fractions (random layout)")
      ->delimiter(',');
  bench->add_option("--regions", regions, "Number of regions (1-6, random layout)");
  bench->add_option("--repetitions", repetitions, "Timing repetitions (best is kept)");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_option("--layout", layout, "random or portrait")
      ->check(CLI::IsMember({"random", "portrait"}));
  bench->add_option("--naive-cap", naive_cap, "Max frame pixels for the naive arm");
  bench->add_option("--format", format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

  std::optional<std::string> second_image, second_labels;
  auto* cycle = app.add_subcommand("cycle-check", "Report cycle-consistency losses");
  pair_flags.add_to(cycle);
  config_flags.add_to(cycle);
  cycle->add_option("--features", features, "pyramid or file:ANIMATED.fmap,TARGET.fmap");
  auto* second_opt =
      cycle->add_option("--second-target", second_image, "Second target image for L_c'");
  auto* second_labels_opt =
      cycle->add_option("--second-labels", second_labels, "Label map of the second target");
  second_opt->needs(second_labels_opt);
  second_labels_opt->needs(second_opt);
  cycle->add_option("--format", format, "text or kv")->check(CLI::IsMember({"text", "kv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (preprocess->parsed()) {
      const auto config = config_flags.build();
      const auto paths = pair_flags.paths();
      check(hb_preprocess(&paths, config.get(), out_dir.c_str()), "preprocess");
    } else if (refs->parsed()) {
      const auto config = config_flags.build();
      check(hb_refs(bundle_dir.c_str(), features.c_str(), config.get()), "refs");
    } else if (swap->parsed()) {
      const auto config = config_flags.build();
      const auto paths = pair_flags.paths();
      check(hb_swap(&paths, config.get(), features.c_str(), output.c_str(),
                    keep_intermediates ? 1 : 0),
            "swap");
    } else if (bench->parsed()) {
      hb_bench_options options;
      hb_bench_options_init(&options);
      options.sizes = sizes.data();
      options.size_count = sizes.size();
      options.fractions = fractions.data();
      options.fraction_count = fractions.size();
      options.regions = regions;
      options.repetitions = repetitions;
      options.seed = seed;
      options.portrait_layout = layout == "portrait" ? 1 : 0;
      if (naive_cap > 0) options.naive_pixel_cap = naive_cap;
      hb_report* raw = nullptr;
      check(hb_bench(&options, &raw), "bench");
      ReportPtr report(raw, hb_report_destroy);
      print_report(report.get(), format);
    } else if (cycle->parsed()) {
      const auto config = config_flags.build();
      const auto paths = pair_flags.paths();
      hb_report* raw = nullptr;
      check(hb_cycle_check(&paths, second_image ? second_image->c_str() : nullptr,
                           second_labels ? second_labels->c_str() : nullptr, features.c_str(),
                           config.get(), &raw),
            "cycle-check");
      ReportPtr report(raw, hb_report_destroy);
      print_report(report.get(), format);
    }
  } catch (const Failure& f) {
    std::cerr << "headblend: error: " << f.message << "\n";
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::cerr << "headblend: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
