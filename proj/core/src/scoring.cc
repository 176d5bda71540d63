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

#include "adg/scoring.h"

#include <algorithm>
#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "adg/bundle.h"
#include "adg/error.h"
#include "adg/parallel.h"

namespace adg {
namespace {

constexpr double kDispersionIdentityTolerance = 1e-6;
constexpr std::size_t kPoolChunk = 64;

template <typename T>
DivergenceRecord ScoreImpl(std::span<const T> raw, std::size_t k, std::size_t d,
                           const ScoreConfig& cfg, std::uint64_t id) {
  try {
    const AnswerMatrix answers = NormalizeAnswers(raw, k, d);
    const CenteredGram gram = ComputeCenteredGram(answers);
    EigenSpectrum spectrum = EigSymmetric(gram, cfg);

    DivergenceRecord record;
    record.id = id;
    record.lambda = cfg.lambda;
    record.dispersion = Dispersion(gram, cfg);
    record.anisotropy = Anisotropy(spectrum, cfg);
    record.score = Fuse(record.dispersion, record.anisotropy, cfg);
    record.eigenvalues = std::move(spectrum.values);
    return record;
  } catch (const Error& e) {
    throw e.WithItem(id);
  }
}

}  // namespace

void ScoreConfig::Validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kConfig, fmt::format("lambda must lie in [0, 1], got {}", lambda));
  }
  if (!(trace_floor > 0.0) || !(eig_tolerance > 0.0)) {
    throw Error(ErrorKind::kConfig, "trace_floor and eig_tolerance must be positive");
  }
  if (max_sweeps < 1) throw Error(ErrorKind::kConfig, "max_sweeps must be >= 1");
}

double DispersionFromTrace(const CenteredGram& gram) {
  return gram.trace / static_cast<double>(gram.k);
}

double Dispersion(const CenteredGram& gram, const ScoreConfig& cfg) {
  if (gram.trace <= cfg.trace_floor) return 0.0;
  const double d = std::clamp(1.0 - gram.mean_sq_norm, 0.0, 1.0);
  if (cfg.verify) {
    const double via_trace = DispersionFromTrace(gram);
    if (std::abs(d - via_trace) > kDispersionIdentityTolerance) {
      throw Error(ErrorKind::kDomain,
                  fmt::format("dispersion identity violated: 1-|mu|^2 = {:.17g}, "
                              "trace/K = {:.17g}",
                              d, via_trace));
    }
  }
  return d;
}

double Anisotropy(const EigenSpectrum& spectrum, const ScoreConfig& cfg) {
  if (spectrum.values.empty()) return 0.0;
  double total = 0.0;
  for (double g : spectrum.values) total += g;
  if (total <= cfg.trace_floor) return 0.0;
  return std::max(0.0, 1.0 - spectrum.values.front() / total);
}

double Fuse(double dispersion, double anisotropy, const ScoreConfig& cfg) {
  return (1.0 - cfg.lambda) * dispersion + cfg.lambda * anisotropy;
}

GramScores ScoreGram(const CenteredGram& gram, const ScoreConfig& cfg) {
  GramScores out;
  const EigenSpectrum spectrum = EigSymmetric(gram, cfg);
  out.dispersion = gram.trace <= cfg.trace_floor ? 0.0 : DispersionFromTrace(gram);
  out.anisotropy = Anisotropy(spectrum, cfg);
  out.score = Fuse(out.dispersion, out.anisotropy, cfg);
  return out;
}

DivergenceRecord ScoreInstruction(std::span<const double> raw, std::size_t k, std::size_t d,
                                  const ScoreConfig& cfg, std::uint64_t id) {
  return ScoreImpl(raw, k, d, cfg, id);
}

DivergenceRecord ScoreInstruction(std::span<const float> raw, std::size_t k, std::size_t d,
                                  const ScoreConfig& cfg, std::uint64_t id) {
  return ScoreImpl(raw, k, d, cfg, id);
}

PoolResult ScorePool(const ItemSource& source, const ScoreConfig& cfg,
                     const PoolOptions& options) {
  cfg.Validate();
  const std::uint64_t n = source.item_count();
  const std::size_t k = source.vectors_per_item();
  const std::size_t d = source.dim();
  if (k < 2) {
    throw Error(ErrorKind::kDomain, fmt::format("scoring needs K >= 2, bundle has K = {}", k));
  }

  std::vector<DivergenceRecord> slots(n);
  std::vector<std::exception_ptr> failures(n);
  ParallelChunks(n, kPoolChunk, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<float> buffer(k * d);
    for (std::size_t i = begin; i < end; ++i) {
      try {
        source.Read(i, buffer);
        slots[i] = ScoreInstruction(std::span<const float>(buffer), k, d, cfg, i);
      } catch (const Error& e) {
        failures[i] = std::make_exception_ptr(e.WithItem(i));
      }
    }
  });

  PoolResult result;
  result.records.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!failures[i]) {
      result.records.push_back(std::move(slots[i]));
      continue;
    }
    if (!options.permissive) std::rethrow_exception(failures[i]);
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      result.errors.push_back({i, std::string(ErrorKindName(e.kind())), e.what()});
    }
  }
  return result;
}

}  // namespace adg
