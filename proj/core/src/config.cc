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

#include "adg/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "adg/error.h"
#include "json.hpp"

namespace adg {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(std::string_view field, std::string_view problem) {
  throw Error(ErrorKind::kConfig, fmt::format("config field '{}': {}", field, problem));
}

void RejectUnknown(const json& object, std::string_view where,
                   const std::set<std::string>& allowed) {
  for (const auto& [key, _] : object.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorKind::kConfig,
                  fmt::format("unknown config key '{}{}'", where.empty() ? "" : fmt::format("{}.", where), key));
    }
  }
}

double GetReal(const json& j, const char* key, std::string_view field, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) Fail(field, "expected a number");
  return it->get<double>();
}

std::uint64_t GetUnsigned(const json& j, const char* key, std::string_view field,
                          std::uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned()) Fail(field, "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

bool GetBool(const json& j, const char* key, std::string_view field, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) Fail(field, "expected true or false");
  return it->get<bool>();
}

std::filesystem::path GetPath(const json& j, const char* key, std::string_view field) {
  auto it = j.find(key);
  if (it == j.end()) Fail(field, "is required");
  if (!it->is_string() || it->get<std::string>().empty()) Fail(field, "expected a non-empty path");
  return it->get<std::string>();
}

}  // namespace

std::uint64_t ParseSeed(std::string_view text, std::string_view source) {
  std::uint64_t value = 0;
  if (text.empty()) Fail(source, "empty seed");
  for (char c : text) {
    if (c < '0' || c > '9') Fail(source, fmt::format("seed '{}' is not a decimal integer", text));
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (value > (UINT64_MAX - digit) / 10) Fail(source, "seed overflows 64 bits");
    value = value * 10 + digit;
  }
  return value;
}

ScoreConfig PipelineConfig::score_config() const {
  ScoreConfig cfg;
  cfg.lambda = lambda;
  return cfg;
}

KMeansConfig PipelineConfig::kmeans_config() const {
  KMeansConfig cfg;
  cfg.bins = bins;
  cfg.seed = seed;
  cfg.max_iterations = kmeans_max_iterations;
  cfg.rel_inertia_tol = kmeans_rel_inertia_tol;
  cfg.normalize_inputs = normalize_semantic;
  cfg.threads = threads;
  return cfg;
}

PipelineConfig ParsePipelineConfig(std::string_view json_text,
                                   std::optional<std::string> env_seed) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  RejectUnknown(j, "",
                {"lambda", "bins", "budget", "seed", "segment", "global_segment", "permissive",
                 "threads", "kmeans", "paths", "extractor"});

  PipelineConfig c;
  c.lambda = GetReal(j, "lambda", "lambda", c.lambda);
  if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) Fail("lambda", "must lie in [0, 1]");
  const std::uint64_t bins = GetUnsigned(j, "bins", "bins", c.bins);
  if (bins < 1 || bins > UINT32_MAX) Fail("bins", "must be in [1, 2^32)");
  c.bins = static_cast<std::uint32_t>(bins);
  c.budget = GetUnsigned(j, "budget", "budget", c.budget);

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) Fail("seed", "expected a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  } else if (env_seed.has_value()) {
    c.seed = ParseSeed(*env_seed, "ADG_SEED");
  }

  if (auto it = j.find("segment"); it != j.end()) {
    if (!it->is_string()) Fail("segment", "expected \"top\", \"middle\" or \"tail\"");
    auto segment = ParseSegment(it->get<std::string>());
    if (!segment) Fail("segment", "expected \"top\", \"middle\" or \"tail\"");
    c.segment = *segment;
  }
  c.global_segment = GetBool(j, "global_segment", "global_segment", c.global_segment);
  c.permissive = GetBool(j, "permissive", "permissive", c.permissive);
  const std::uint64_t threads = GetUnsigned(j, "threads", "threads", c.threads);
  if (threads < 1 || threads > 1024) Fail("threads", "must be in [1, 1024]");
  c.threads = static_cast<unsigned>(threads);

  if (auto it = j.find("kmeans"); it != j.end()) {
    if (!it->is_object()) Fail("kmeans", "expected an object");
    RejectUnknown(*it, "kmeans", {"max_iterations", "rel_inertia_tol", "normalize_inputs"});
    const std::uint64_t iters =
        GetUnsigned(*it, "max_iterations", "kmeans.max_iterations", c.kmeans_max_iterations);
    if (iters < 1 || iters > 1000000) Fail("kmeans.max_iterations", "must be in [1, 1e6]");
    c.kmeans_max_iterations = static_cast<int>(iters);
    c.kmeans_rel_inertia_tol =
        GetReal(*it, "rel_inertia_tol", "kmeans.rel_inertia_tol", c.kmeans_rel_inertia_tol);
    if (!(c.kmeans_rel_inertia_tol >= 0.0)) Fail("kmeans.rel_inertia_tol", "must be >= 0");
    c.normalize_semantic =
        GetBool(*it, "normalize_inputs", "kmeans.normalize_inputs", c.normalize_semantic);
  }

  auto paths = j.find("paths");
  if (paths == j.end()) Fail("paths", "is required");
  if (!paths->is_object()) Fail("paths", "expected an object");
  RejectUnknown(*paths, "paths", {"answers_bundle", "semantic_bundle", "output_dir"});
  c.paths.answers_bundle = GetPath(*paths, "answers_bundle", "paths.answers_bundle");
  c.paths.semantic_bundle = GetPath(*paths, "semantic_bundle", "paths.semantic_bundle");
  c.paths.output_dir = GetPath(*paths, "output_dir", "paths.output_dir");

  if (auto it = j.find("extractor"); it != j.end()) {
    if (!it->is_object()) Fail("extractor", "expected an object");
    RejectUnknown(*it, "extractor",
                  {"K", "temperature", "top_p", "max_new_tokens", "layer_window"});
    auto& e = c.extractor;
    const std::uint64_t k = GetUnsigned(*it, "K", "extractor.K", e.answers_per_instruction);
    if (k < 2 || k > UINT32_MAX) Fail("extractor.K", "must be >= 2");
    e.answers_per_instruction = static_cast<std::uint32_t>(k);
    e.temperature = GetReal(*it, "temperature", "extractor.temperature", e.temperature);
    if (!(e.temperature > 0.0)) Fail("extractor.temperature", "must be > 0");
    e.top_p = GetReal(*it, "top_p", "extractor.top_p", e.top_p);
    if (!(e.top_p > 0.0 && e.top_p <= 1.0)) Fail("extractor.top_p", "must lie in (0, 1]");
    const std::uint64_t tokens =
        GetUnsigned(*it, "max_new_tokens", "extractor.max_new_tokens", e.max_new_tokens);
    if (tokens < 1 || tokens > UINT32_MAX) Fail("extractor.max_new_tokens", "must be >= 1");
    e.max_new_tokens = static_cast<std::uint32_t>(tokens);
    if (auto w = it->find("layer_window"); w != it->end()) {
      if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number_integer() ||
          !(*w)[1].is_number_integer()) {
        Fail("extractor.layer_window", "expected [first, last] integer layer indices");
      }
      e.layer_first = (*w)[0].get<int>();
      e.layer_last = (*w)[1].get<int>();
      if ((e.layer_first < 0) == (e.layer_last < 0) && e.layer_first > e.layer_last) {
        Fail("extractor.layer_window", "first layer must not come after last");
      }
    }
  }
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, fmt::format("cannot read config {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  std::optional<std::string> env_seed;
  if (const char* value = std::getenv("ADG_SEED"); value != nullptr) env_seed = value;
  PipelineConfig config = ParsePipelineConfig(text.str(), env_seed);
  // Relative paths resolve against the config file's directory.
  const auto base = path.parent_path();
  for (auto* p : {&config.paths.answers_bundle, &config.paths.semantic_bundle,
                  &config.paths.output_dir}) {
    if (p->is_relative()) *p = base / *p;
  }
  return config;
}

std::string PipelineConfigToJson(const PipelineConfig& c) {
  json j;
  j["lambda"] = c.lambda;
  j["bins"] = c.bins;
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  j["segment"] = std::string(SegmentName(c.segment));
  j["global_segment"] = c.global_segment;
  j["permissive"] = c.permissive;
  j["threads"] = c.threads;
  j["kmeans"] = {{"max_iterations", c.kmeans_max_iterations},
                 {"rel_inertia_tol", c.kmeans_rel_inertia_tol},
                 {"normalize_inputs", c.normalize_semantic}};
  j["paths"] = {{"answers_bundle", c.paths.answers_bundle.string()},
                {"semantic_bundle", c.paths.semantic_bundle.string()},
                {"output_dir", c.paths.output_dir.string()}};
  j["extractor"] = {{"K", c.extractor.answers_per_instruction},
                    {"temperature", c.extractor.temperature},
                    {"top_p", c.extractor.top_p},
                    {"max_new_tokens", c.extractor.max_new_tokens},
                    {"layer_window", {c.extractor.layer_first, c.extractor.layer_last}}};
  return j.dump(2);
}

}  // namespace adg
