// Copyright 2026 The ADG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADG_CONFIG_H_
#define ADG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "adg/kmeans.h"
#include "adg/records.h"
#include "adg/scoring.h"

namespace adg {

inline constexpr std::uint64_t kDefaultBudget = 10000;

// Sampling settings of the embedding extractor. Echoed into run reports so
// a selection can be traced back to how its answers were produced; the
// scoring core never reads them.
struct ExtractorEcho {
  std::uint32_t answers_per_instruction = 5;  // K
  double temperature = 1.4;
  double top_p = 0.9;
  std::uint32_t max_new_tokens = 180;
  // Inclusive layer range; negative indices count from the last layer.
  int layer_first = -4;
  int layer_last = -1;
};

struct PipelinePaths {
  std::filesystem::path answers_bundle;
  std::filesystem::path semantic_bundle;
  std::filesystem::path output_dir;
};

struct PipelineConfig {
  double lambda = kDefaultLambda;
  std::uint32_t bins = kDefaultBins;
  std::uint64_t budget = kDefaultBudget;
  std::uint64_t seed = 0;
  Segment segment = Segment::kTop;
  bool global_segment = false;
  bool permissive = false;
  unsigned threads = 1;
  int kmeans_max_iterations = 100;
  double kmeans_rel_inertia_tol = 1e-4;
  bool normalize_semantic = true;
  PipelinePaths paths;
  ExtractorEcho extractor;

  ScoreConfig score_config() const;
  KMeansConfig kmeans_config() const;
};

// Parses a JSON config. Unknown keys, wrong types and missing required
// paths throw Error{kConfig} naming the field. When "seed" is absent the
// value of `env_seed` (normally $ADG_SEED) is used, else 0.
PipelineConfig ParsePipelineConfig(std::string_view json_text,
                                   std::optional<std::string> env_seed = std::nullopt);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

// Serializes every field, including defaults.
std::string PipelineConfigToJson(const PipelineConfig& config);

// Parses a decimal u64 seed; throws Error{kConfig}.
std::uint64_t ParseSeed(std::string_view text, std::string_view source);

}  // namespace adg

#endif  // ADG_CONFIG_H_
