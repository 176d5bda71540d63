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

#include "adg/pipeline.h"

#include <chrono>
#include <fstream>

#include <fmt/format.h>

#include "adg/error.h"
#include "adg/quota.h"
#include "adg/stats.h"
#include "json.hpp"

namespace adg {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json DistributionJson(std::span<const double> values) {
  const Distribution d = Summarize(values);
  return {{"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"deciles", d.deciles}};
}

template <typename Fn>
auto RunStage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("stage '{}': {}", stage, e.what()), e.item());
  }
}

}  // namespace

BundleReader OpenBundle(const std::filesystem::path& path, BundleKind kind) {
  BundleReader reader = BundleReader::Open(path);
  if (reader.header().kind != kind) {
    throw Error(ErrorKind::kConfig,
                fmt::format("{} is a {} bundle, expected {}", path.string(),
                            BundleKindName(reader.header().kind), BundleKindName(kind)));
  }
  return reader;
}

PoolResult ScoreBundle(const BundleReader& answers, const ScoreConfig& cfg,
                       const PoolOptions& options) {
  if (answers.header().kind != BundleKind::kAnswers) {
    throw Error(ErrorKind::kConfig, "scoring needs an answers bundle");
  }
  return ScorePool(answers, cfg, options);
}

void WriteItemErrors(const std::filesystem::path& path, std::span<const ItemError> errors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  for (const auto& e : errors) {
    out << json{{"id", e.id}, {"kind", e.kind}, {"message", e.message}}.dump() << '\n';
  }
  out.close();
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path.string()));
}

SelectOutcome SelectFromRecords(std::span<const DivergenceRecord> records,
                                const ItemSource& semantic, const SelectParams& params) {
  const std::uint64_t n = semantic.item_count();
  if (semantic.vectors_per_item() != 1) {
    throw Error(ErrorKind::kConfig, "semantic bundle must carry one vector per item");
  }

  double lambda = kDefaultLambda;
  if (!records.empty()) lambda = records.front().lambda;
  for (const auto& r : records) {
    if (r.lambda != lambda) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("score records mix lambda values ({} and {})", lambda, r.lambda),
                  r.id);
    }
    if (r.id >= n) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("score record id {} has no semantic embedding (N = {})", r.id, n),
                  r.id);
    }
  }
  if (!params.permissive && records.size() != n) {
    throw Error(ErrorKind::kConsistency,
                fmt::format("score file has {} records, semantic bundle has {} items",
                            records.size(), n));
  }
  if (params.budget > records.size()) {
    throw Error(ErrorKind::kInfeasibleBudget,
                fmt::format("budget {} exceeds the {} scored instructions", params.budget,
                            records.size()));
  }

  SelectOutcome outcome;
  outcome.bins = KMeansFit(semantic, params.kmeans);

  // Compact to the scored ids; identity unless permissive dropped some.
  std::vector<std::uint64_t> original_id(records.size());
  std::vector<DivergenceRecord> compact(records.begin(), records.end());
  std::vector<std::uint32_t> bin_of(records.size());
  for (std::size_t i = 0; i < compact.size(); ++i) {
    if (i > 0 && compact[i].id <= compact[i - 1].id) {
      throw Error(ErrorKind::kConsistency, "score records must be sorted by id without duplicates");
    }
    original_id[i] = compact[i].id;
    bin_of[i] = outcome.bins.assignment[compact[i].id];
    compact[i].id = i;
  }
  std::vector<std::uint64_t> sizes(outcome.bins.bins(), 0);
  for (auto b : bin_of) ++sizes[b];
  const QuotaTable quotas = AllocateQuotas(sizes, params.budget);

  outcome.manifest = BinwiseSelect(compact, bin_of, quotas, params.select);
  for (auto& line : outcome.manifest.lines) line.id = original_id[line.id];
  outcome.manifest.summary.seed = params.kmeans.seed;
  outcome.manifest.summary.lambda = lambda;
  outcome.manifest.summary.prng = outcome.bins.prng;
  return outcome;
}

PipelineResult RunPipeline(const PipelineConfig& config) {
  const auto start = Clock::now();
  PipelineResult result;

  const auto& paths = config.paths;
  std::error_code ec;
  std::filesystem::create_directories(paths.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                fmt::format("cannot create {}: {}", paths.output_dir.string(), ec.message()));
  }

  BundleReader answers = RunStage("score", [&] { return OpenBundle(paths.answers_bundle, BundleKind::kAnswers); });
  BundleReader semantic = RunStage("bin", [&] { return OpenBundle(paths.semantic_bundle, BundleKind::kSemantic); });
  if (config.budget > answers.item_count()) {
    throw Error(ErrorKind::kInfeasibleBudget,
                fmt::format("budget {} exceeds pool size {}", config.budget, answers.item_count()));
  }

  auto t = Clock::now();
  result.scores = RunStage("score", [&] {
    PoolOptions options{config.threads, config.permissive};
    PoolResult scored = ScoreBundle(answers, config.score_config(), options);
    WriteDivergenceRecords(paths.output_dir / kScoresFile, scored.records);
    if (!scored.errors.empty()) WriteItemErrors(paths.output_dir / kScoreErrorsFile, scored.errors);
    return scored;
  });
  result.timings.score_seconds = SecondsSince(t);

  SelectParams params;
  params.budget = config.budget;
  params.kmeans = config.kmeans_config();
  params.select = {config.segment, config.global_segment};
  params.permissive = config.permissive;

  t = Clock::now();
  result.selection = RunStage("select", [&] {
    return SelectFromRecords(result.scores.records, semantic, params);
  });
  result.timings.select_seconds = SecondsSince(t);
  t = Clock::now();
  RunStage("select", [&] {
    WriteManifest(paths.output_dir / kManifestFile, result.selection.manifest);
    const auto ids = result.selection.manifest.SelectedIds();
    WriteSelectedIds(paths.output_dir / kSelectedIdsFile, ids);
    return 0;
  });
  result.timings.write_seconds = SecondsSince(t);
  result.timings.total_seconds = SecondsSince(start);

  result.report_path = paths.output_dir / kRunReportFile;
  std::ofstream report(result.report_path, std::ios::binary | std::ios::trunc);
  report << BuildRunReport(config, result, answers.header(), semantic.header()) << '\n';
  report.close();
  if (!report) throw Error(ErrorKind::kIo, "failed writing run report");
  return result;
}

std::string BuildRunReport(const PipelineConfig& config, const PipelineResult& result,
                           const BundleHeader& answers, const BundleHeader& semantic) {
  std::vector<double> dispersion, anisotropy, score, selected_score;
  const auto& records = result.scores.records;
  for (const auto& r : records) {
    dispersion.push_back(r.dispersion);
    anisotropy.push_back(r.anisotropy);
    score.push_back(r.score);
  }
  for (const auto& line : result.selection.manifest.lines) {
    if (line.selected) selected_score.push_back(line.score);
  }

  json report;
  report["config"] = json::parse(PipelineConfigToJson(config));
  report["pool"] = {{"items", answers.item_count},
                    {"answers_per_item", answers.vectors_per_item},
                    {"answer_dim", answers.dim},
                    {"semantic_dim", semantic.dim},
                    {"scored", records.size()},
                    {"score_errors", result.scores.errors.size()}};
  report["timings_seconds"] = {{"score", result.timings.score_seconds},
                               {"select", result.timings.select_seconds},
                               {"write_outputs", result.timings.write_seconds},
                               {"total", result.timings.total_seconds}};
  report["kmeans"] = {{"iterations", result.selection.bins.iterations_run},
                      {"inertia", result.selection.bins.inertia},
                      {"prng", result.selection.bins.prng}};
  report["scores"] = {{"dispersion", DistributionJson(dispersion)},
                      {"anisotropy", DistributionJson(anisotropy)},
                      {"score", DistributionJson(score)}};
  report["selected"] = {{"count", selected_score.size()},
                        {"score", DistributionJson(selected_score)}};
  return report.dump(2);
}

}  // namespace adg
