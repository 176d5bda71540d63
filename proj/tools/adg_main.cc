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

// adg: score instructions by answer divergence and select a budgeted subset.
//
//   adg score    --answers a.adge --lambda 0.4 --out s.jsonl
//   adg select   --scores s.jsonl --semantic z.adge --budget 10000 --bins 1000
//                --manifest m.jsonl --ids ids.txt
//   adg pipeline --config run.json
//   adg synth    --scenario high_D_high_I --seed 17 --out DIR
//   adg verify   [--inject-fault skip-centering|naive-rounding]
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
// Failures print one JSON line {"error": {...}} on stderr.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "adg/bundle.h"
#include "adg/config.h"
#include "adg/error.h"
#include "adg/pipeline.h"
#include "adg/records.h"
#include "adg/scoring.h"
#include "adg/synth.h"
#include "adg/verify.h"
#include "json.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int ReportError(const adg::Error& e) {
  nlohmann::json line = {{"kind", adg::ErrorKindName(e.kind())}, {"message", e.what()}};
  if (e.item()) line["id"] = *e.item();
  std::cerr << nlohmann::json{{"error", line}}.dump() << '\n';
  return e.kind() == adg::ErrorKind::kConfig ? kExitUsage : kExitRuntime;
}

std::uint64_t ResolveSeed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ADG_SEED"); env != nullptr) {
    return adg::ParseSeed(env, "ADG_SEED");
  }
  return 0;
}

struct ScoreArgs {
  std::string answers;
  std::string out;
  std::string error_report;
  double lambda = adg::kDefaultLambda;
  unsigned threads = 1;
  bool permissive = false;
};

int RunScore(const ScoreArgs& args) {
  adg::ScoreConfig cfg;
  cfg.lambda = args.lambda;
  const adg::BundleReader answers = adg::OpenBundle(args.answers, adg::BundleKind::kAnswers);
  const adg::PoolResult result =
      adg::ScoreBundle(answers, cfg, {args.threads, args.permissive});
  adg::WriteDivergenceRecords(args.out, result.records);
  if (!result.errors.empty()) {
    const std::string report = args.error_report.empty() ? args.out + ".errors.jsonl" : args.error_report;
    adg::WriteItemErrors(report, result.errors);
    std::cerr << fmt::format("{} instructions failed scoring; see {}\n", result.errors.size(), report);
  }
  return 0;
}

struct SelectArgs {
  std::string scores;
  std::string semantic;
  std::string manifest;
  std::string ids;
  std::uint64_t budget = adg::kDefaultBudget;
  std::uint32_t bins = adg::kDefaultBins;
  std::optional<std::uint64_t> seed;
  std::string segment = "top";
  bool global_segment = false;
  bool permissive = false;
  bool no_normalize = false;
  int max_iterations = 100;
  double rel_inertia_tol = 1e-4;
  unsigned threads = 1;
};

int RunSelect(const SelectArgs& args) {
  const auto records = adg::ReadDivergenceRecords(args.scores);
  const adg::BundleReader semantic = adg::OpenBundle(args.semantic, adg::BundleKind::kSemantic);

  adg::SelectParams params;
  params.budget = args.budget;
  params.kmeans.bins = args.bins;
  params.kmeans.seed = ResolveSeed(args.seed);
  params.kmeans.max_iterations = args.max_iterations;
  params.kmeans.rel_inertia_tol = args.rel_inertia_tol;
  params.kmeans.normalize_inputs = !args.no_normalize;
  params.kmeans.threads = args.threads;
  params.select.segment = *adg::ParseSegment(args.segment);
  params.select.global_segment = args.global_segment;
  params.permissive = args.permissive;

  const adg::SelectOutcome outcome = adg::SelectFromRecords(records, semantic, params);
  adg::WriteManifest(args.manifest, outcome.manifest);
  const auto ids = outcome.manifest.SelectedIds();
  adg::WriteSelectedIds(args.ids, ids);
  return 0;
}

int RunPipelineCommand(const std::string& config_path, std::optional<unsigned> threads,
                       bool global_segment, bool permissive) {
  adg::PipelineConfig config = adg::LoadPipelineConfig(config_path);
  if (threads) config.threads = *threads;
  if (global_segment) config.global_segment = true;
  if (permissive) config.permissive = true;
  const adg::PipelineResult result = adg::RunPipeline(config);
  std::cout << fmt::format("scored {} instructions, selected {}; report: {}\n",
                           result.scores.records.size(),
                           result.selection.manifest.SelectedIds().size(),
                           result.report_path.string());
  return 0;
}

struct SynthArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::uint64_t items = 100;
  std::uint32_t k = 5;
  std::uint32_t dim = 64;
  std::uint32_t semantic_dim = 16;
  std::uint32_t topics = 256;
};

int RunSynth(const SynthArgs& args) {
  adg::SynthSpec spec;
  if (args.scenario != "mixed") spec.scenario = adg::ParseQuadrant(args.scenario);
  spec.items = args.items;
  spec.k = args.k;
  spec.dim = args.dim;
  spec.semantic_dim = args.semantic_dim;
  spec.topics = args.topics;
  spec.seed = ResolveSeed(args.seed);
  const adg::SynthOutputs out = adg::WriteSynthBundles(spec, args.out);
  std::cout << fmt::format("wrote {} and {}\n", out.answers.string(), out.semantic.string());
  return 0;
}

int RunVerify(const std::string& fault_name, std::uint64_t seed) {
  adg::VerifyOptions options;
  options.fault = *adg::ParseFault(fault_name);
  options.seed = seed;
  const auto results = adg::RunVerification(options);
  bool all = true;
  for (const auto& r : results) {
    std::cout << fmt::format("[{}] {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
    all = all && r.passed;
  }
  std::cout << fmt::format("{} checks, {}\n", results.size(), all ? "all passed" : "FAILURES");
  return all ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Answer-divergence scoring and bin-wise data selection"};
  app.require_subcommand(1);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score an answers bundle");
  score_cmd->add_option("--answers", score.answers, "Answers ADGE bundle")->required();
  score_cmd->add_option("--out", score.out, "Output score records (JSON lines)")->required();
  score_cmd->add_option("--lambda", score.lambda, "Anisotropy weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  score_cmd->add_option("--threads", score.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  score_cmd->add_flag("--permissive", score.permissive, "Report failing items instead of aborting");
  score_cmd->add_option("--error-report", score.error_report, "Where to list failing items");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "Bin and select from scored instructions");
  select_cmd->add_option("--scores", select.scores, "Score records (JSON lines)")->required();
  select_cmd->add_option("--semantic", select.semantic, "Semantic ADGE bundle")->required();
  select_cmd->add_option("--manifest", select.manifest, "Output selection manifest")->required();
  select_cmd->add_option("--ids", select.ids, "Output selected ids file")->required();
  select_cmd->add_option("--budget", select.budget, "Number of instructions to select");
  select_cmd->add_option("--bins", select.bins, "Number of k-means bins")->check(CLI::PositiveNumber);
  select_cmd->add_option("--seed", select.seed, "k-means seed (default $ADG_SEED or 0)");
  select_cmd->add_option("--segment", select.segment, "Rank band: top, middle or tail")
      ->check(CLI::IsMember({"top", "middle", "tail"}));
  select_cmd->add_flag("--global-segment", select.global_segment,
                       "Apply the segment to the pool-wide ranking");
  select_cmd->add_flag("--permissive", select.permissive, "Allow score files with missing ids");
  select_cmd->add_flag("--no-normalize", select.no_normalize, "Skip L2 normalization of semantic vectors");
  select_cmd->add_option("--max-iterations", select.max_iterations, "k-means iteration cap")
      ->check(CLI::PositiveNumber);
  select_cmd->add_option("--rel-inertia-tol", select.rel_inertia_tol,
                         "k-means relative inertia stopping tolerance")
      ->check(CLI::NonNegativeNumber);
  select_cmd->add_option("--threads", select.threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  std::string config_path;
  std::optional<unsigned> pipeline_threads;
  bool pipeline_global = false;
  bool pipeline_permissive = false;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run score, bin and select from a config");
  pipeline_cmd->add_option("--config", config_path, "Pipeline JSON config")->required();
  pipeline_cmd->add_option("--threads", pipeline_threads, "Override config threads")
      ->check(CLI::Range(1u, 1024u));
  pipeline_cmd->add_flag("--global-segment", pipeline_global, "Apply the segment pool-wide");
  pipeline_cmd->add_flag("--permissive", pipeline_permissive, "Skip items that fail scoring");

  SynthArgs synth;
  std::vector<std::string> scenario_names = {"mixed"};
  for (auto q : adg::kAllQuadrants) scenario_names.emplace_back(adg::QuadrantName(q));
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic answer and semantic bundles");
  synth_cmd->add_option("--scenario", synth.scenario, "Quadrant name or 'mixed'")
      ->required()
      ->check(CLI::IsMember(scenario_names));
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed (default $ADG_SEED or 0)");
  synth_cmd->add_option("--items", synth.items, "Number of instructions")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--K", synth.k, "Answers per instruction")->check(CLI::Range(2u, 64u));
  synth_cmd->add_option("--dim", synth.dim, "Answer embedding dimension")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--semantic-dim", synth.semantic_dim, "Semantic embedding dimension")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--topics", synth.topics, "Semantic topic count")->check(CLI::PositiveNumber);

  std::string fault = "none";
  std::uint64_t verify_seed = 7;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle verification suite");
  verify_cmd->add_option("--inject-fault", fault, "Deliberate defect to demonstrate detection")
      ->check(CLI::IsMember({"none", "skip-centering", "naive-rounding"}));
  verify_cmd->add_option("--seed", verify_seed, "Seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump()
              << '\n';
    return kExitUsage;
  }

  try {
    if (*score_cmd) return RunScore(score);
    if (*select_cmd) return RunSelect(select);
    if (*pipeline_cmd) {
      return RunPipelineCommand(config_path, pipeline_threads, pipeline_global, pipeline_permissive);
    }
    if (*synth_cmd) return RunSynth(synth);
    if (*verify_cmd) return RunVerify(fault, verify_seed);
  } catch (const adg::Error& e) {
    return ReportError(e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()
              << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
