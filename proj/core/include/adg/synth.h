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

#ifndef ADG_SYNTH_H_
#define ADG_SYNTH_H_

// Synthetic answer clouds for the four (dispersion, anisotropy) regimes and
// seeded synthetic pools built from them. Every generated answer row is
// unit norm, and every item is a pure function of (seed, item index).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adg/bundle.h"
#include "adg/prng.h"

namespace adg {

enum class Quadrant { kLowDLowI, kLowDHighI, kHighDLowI, kHighDHighI };

inline constexpr Quadrant kAllQuadrants[] = {Quadrant::kLowDLowI, Quadrant::kLowDHighI,
                                             Quadrant::kHighDLowI, Quadrant::kHighDHighI};

std::string_view QuadrantName(Quadrant q);  // e.g. "low_D_high_I"
std::optional<Quadrant> ParseQuadrant(std::string_view name);

struct QuadrantScenario {
  Quadrant name = Quadrant::kHighDHighI;
  std::uint32_t k = 5;
  std::uint32_t dim = 64;
  // Number of separated modes for high_D_high_I; 0 means one per answer.
  std::uint32_t modes = 0;
  // Regime-specific magnitude; <= 0 selects the default:
  //   low_D_low_I   drift amplitude along the drift axis     (0.08)
  //   low_D_high_I  radius of the isotropic cloud            (0.15)
  //   high_D_low_I  half-angle in radians of the two clumps  (1.0)
  //   high_D_high_I unused
  double spread = 0.0;
  double noise = 1e-3;  // norm of the isotropic perturbation per answer
};

// Returns k x dim row-major unit-norm answers. Requires dim >= k + 2.
std::vector<double> GenerateQuadrantAnswers(const QuadrantScenario& scenario, SplitMix64& rng);

struct SynthSpec {
  // A fixed regime for every item, or nullopt for a mixed pool in which each
  // item draws its regime and magnitude at random.
  std::optional<Quadrant> scenario;
  std::uint64_t items = 100;
  std::uint32_t k = 5;
  std::uint32_t dim = 64;
  std::uint32_t semantic_dim = 16;
  std::uint32_t topics = 256;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Answer embeddings generated on demand.
class SynthAnswerSource final : public ItemSource {
 public:
  explicit SynthAnswerSource(SynthSpec spec);
  std::uint64_t item_count() const override { return spec_.items; }
  std::uint32_t vectors_per_item() const override { return spec_.k; }
  std::uint32_t dim() const override { return spec_.dim; }
  void Read(std::uint64_t index, std::span<float> out) const override;

  // The regime item `index` was drawn from.
  Quadrant QuadrantOf(std::uint64_t index) const;

 private:
  SynthSpec spec_;
};

// Semantic embeddings: a mixture of `topics` Gaussian centres.
class SynthSemanticSource final : public ItemSource {
 public:
  explicit SynthSemanticSource(SynthSpec spec);
  std::uint64_t item_count() const override { return spec_.items; }
  std::uint32_t vectors_per_item() const override { return 1; }
  std::uint32_t dim() const override { return spec_.semantic_dim; }
  void Read(std::uint64_t index, std::span<float> out) const override;

 private:
  SynthSpec spec_;
  std::vector<double> centres_;
};

// Streams `source` into an ADGE bundle of the given kind.
void WriteSourceBundle(const std::filesystem::path& path, const ItemSource& source,
                       BundleKind kind, const std::map<std::string, std::string>& metadata = {});

struct SynthOutputs {
  std::filesystem::path answers;
  std::filesystem::path semantic;
};

// Writes answers.adge and semantic.adge into `out_dir` (created if needed).
SynthOutputs WriteSynthBundles(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace adg

#endif  // ADG_SYNTH_H_
