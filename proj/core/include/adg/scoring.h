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

#ifndef ADG_SCORING_H_
#define ADG_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adg/eigen.h"
#include "adg/geometry.h"
#include "adg/records.h"

namespace adg {

class ItemSource;

inline constexpr double kDefaultLambda = 0.4;

struct ScoreConfig {
  double lambda = kDefaultLambda;  // weight of anisotropy in the fused score
  double trace_floor = 1e-12;      // spectra with smaller mass are treated as empty
  double eig_tolerance = 1e-12;
  int max_sweeps = 64;
  // Cross-checks 1 - ||mu||^2 against trace(S_c)/K on every instruction.
  bool verify = false;

  void Validate() const;
};

// Dispersion magnitude 1 - ||mu||^2 of unit-norm answers, clamped to
// [0, 1]. Returns exactly 0 when trace(S_c) <= cfg.trace_floor.
double Dispersion(const CenteredGram& gram, const ScoreConfig& cfg = {});

// Translation-invariant form trace(S_c) / K.
double DispersionFromTrace(const CenteredGram& gram);

// 1 - gamma_1 / sum(gamma), or 0 when the spectrum sums to at most
// cfg.trace_floor.
double Anisotropy(const EigenSpectrum& spectrum, const ScoreConfig& cfg = {});

// (1 - lambda) * dispersion + lambda * anisotropy.
double Fuse(double dispersion, double anisotropy, const ScoreConfig& cfg);

// Scores computed purely from S_c (dispersion via the trace form). Used
// where the rows fed to the Gram step are not unit norm.
struct GramScores {
  double dispersion = 0.0;
  double anisotropy = 0.0;
  double score = 0.0;
};
GramScores ScoreGram(const CenteredGram& gram, const ScoreConfig& cfg);

// normalize -> centered Gram -> eigenspectrum -> (D, I, s). Errors carry
// the instruction id.
DivergenceRecord ScoreInstruction(std::span<const double> raw, std::size_t k, std::size_t d,
                                  const ScoreConfig& cfg, std::uint64_t id = 0);
DivergenceRecord ScoreInstruction(std::span<const float> raw, std::size_t k, std::size_t d,
                                  const ScoreConfig& cfg, std::uint64_t id = 0);

struct PoolOptions {
  unsigned threads = 1;
  // Collect per-instruction failures instead of aborting on the first.
  bool permissive = false;
};

struct ItemError {
  std::uint64_t id = 0;
  std::string kind;
  std::string message;
};

struct PoolResult {
  std::vector<DivergenceRecord> records;  // id order
  std::vector<ItemError> errors;          // id order; empty unless permissive
};

// Scores every item of an answers source. Output is identical for any
// thread count. Without `permissive`, the lowest failing id is rethrown.
PoolResult ScorePool(const ItemSource& source, const ScoreConfig& cfg,
                     const PoolOptions& options = {});

}  // namespace adg

#endif  // ADG_SCORING_H_
