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

#ifndef ADG_PIPELINE_H_
#define ADG_PIPELINE_H_

// Stage drivers shared by the command-line tool and the integration tests.
// Each stage is a pure function of its inputs and flags, so running the
// stages one by one produces the same files as RunPipeline.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adg/bundle.h"
#include "adg/config.h"
#include "adg/kmeans.h"
#include "adg/records.h"
#include "adg/scoring.h"
#include "adg/selection.h"

namespace adg {

inline constexpr char kScoresFile[] = "scores.jsonl";
inline constexpr char kManifestFile[] = "manifest.jsonl";
inline constexpr char kSelectedIdsFile[] = "selected_ids.txt";
inline constexpr char kRunReportFile[] = "run_report.json";
inline constexpr char kScoreErrorsFile[] = "score_errors.jsonl";

// Opens `path` and requires the given bundle kind (Error{kConfig} if not).
BundleReader OpenBundle(const std::filesystem::path& path, BundleKind kind);

PoolResult ScoreBundle(const BundleReader& answers, const ScoreConfig& cfg,
                       const PoolOptions& options);

// One JSON object per failed item: {"id", "kind", "message"}.
void WriteItemErrors(const std::filesystem::path& path, std::span<const ItemError> errors);

struct SelectParams {
  std::uint64_t budget = kDefaultBudget;
  KMeansConfig kmeans;
  SelectOptions select;
  // Accept score files that miss some ids (items that failed scoring); they
  // are excluded from selection.
  bool permissive = false;
};

struct SelectOutcome {
  SelectionManifest manifest;
  BinAssignment bins;
};

// k-means over the semantic bundle, proportional quotas, bin-wise ranking.
// Records must cover ids [0, N) of the semantic bundle exactly (a subset
// when `permissive`) and share one lambda.
SelectOutcome SelectFromRecords(std::span<const DivergenceRecord> records,
                                const ItemSource& semantic, const SelectParams& params);

struct StageTimings {
  double score_seconds = 0.0;
  double select_seconds = 0.0;  // k-means, quotas and ranking
  double write_seconds = 0.0;   // manifest and ids files
  double total_seconds = 0.0;
};

struct PipelineResult {
  PoolResult scores;
  SelectOutcome selection;
  StageTimings timings;
  std::filesystem::path report_path;
};

// score -> bin -> select, writing scores, manifest, selected ids and a run
// report into config.paths.output_dir. Failures are rethrown with the stage
// name prefixed.
PipelineResult RunPipeline(const PipelineConfig& config);

std::string BuildRunReport(const PipelineConfig& config, const PipelineResult& result,
                           const BundleHeader& answers, const BundleHeader& semantic);

}  // namespace adg

#endif  // ADG_PIPELINE_H_
