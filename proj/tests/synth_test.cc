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

#include "adg/synth.h"

#include <gtest/gtest.h>

#include <cmath>

#include "adg/bundle.h"
#include "adg/error.h"
#include "adg/scoring.h"
#include "oracle.h"

namespace adg {
namespace {

DivergenceRecord ScoreScenario(Quadrant q, std::uint64_t seed, std::uint32_t k = 5) {
  QuadrantScenario scenario;
  scenario.name = q;
  scenario.k = k;
  SplitMix64 rng(seed);
  const auto rows = GenerateQuadrantAnswers(scenario, rng);
  return ScoreInstruction(rows, k, scenario.dim, ScoreConfig{});
}

TEST(Synth, QuadrantNames) {
  for (auto q : kAllQuadrants) EXPECT_EQ(ParseQuadrant(QuadrantName(q)), q);
  EXPECT_EQ(QuadrantName(Quadrant::kLowDHighI), "low_D_high_I");
  EXPECT_FALSE(ParseQuadrant("medium").has_value());
}

TEST(Synth, QuadrantsLandInTheirRegions) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ll = ScoreScenario(Quadrant::kLowDLowI, seed);
    EXPECT_LT(ll.dispersion, 0.05);
    EXPECT_LT(ll.anisotropy, 0.1);
    const auto lh = ScoreScenario(Quadrant::kLowDHighI, seed);
    EXPECT_LT(lh.dispersion, 0.05);
    EXPECT_GT(lh.anisotropy, 0.5);
    const auto hl = ScoreScenario(Quadrant::kHighDLowI, seed);
    EXPECT_GT(hl.dispersion, 0.5);
    EXPECT_LT(hl.anisotropy, 0.1);
    const auto hh = ScoreScenario(Quadrant::kHighDHighI, seed);
    EXPECT_GT(hh.dispersion, 0.5);
    EXPECT_GT(hh.anisotropy, 0.5);
    EXPECT_GT(hh.score, std::max({ll.score, lh.score, hl.score}));
    EXPECT_LT(ll.score, std::min({lh.score, hl.score, hh.score}));
  }
}

TEST(Synth, RowsAreUnitNorm) {
  for (auto q : kAllQuadrants) {
    QuadrantScenario s;
    s.name = q;
    SplitMix64 rng(3);
    const auto rows = GenerateQuadrantAnswers(s, rng);
    for (std::uint32_t a = 0; a < s.k; ++a) {
      double sq = 0.0;
      for (std::uint32_t j = 0; j < s.dim; ++j) sq += rows[a * s.dim + j] * rows[a * s.dim + j];
      EXPECT_NEAR(sq, 1.0, 1e-12);
    }
  }
}

TEST(Synth, SourcesAreRandomAccessDeterministic) {
  SynthSpec spec;
  spec.items = 50;
  spec.seed = 4;
  SynthAnswerSource a(spec), b(spec);
  SynthSemanticSource sa(spec), sb(spec);
  std::vector<float> x(spec.k * spec.dim), y(spec.k * spec.dim);
  std::vector<float> u(spec.semantic_dim), w(spec.semantic_dim);
  for (std::uint64_t i : {49u, 3u, 0u, 3u}) {
    a.Read(i, x);
    b.Read(i, y);
    EXPECT_EQ(x, y);
    sa.Read(i, u);
    sb.Read(i, w);
    EXPECT_EQ(u, w);
  }
  spec.seed = 5;
  SynthAnswerSource c(spec);
  c.Read(3, y);
  a.Read(3, x);
  EXPECT_NE(x, y);
}

TEST(Synth, MixedPoolCoversAllQuadrants) {
  SynthSpec spec;
  spec.items = 400;
  SynthAnswerSource source(spec);
  std::array<int, 4> seen{};
  for (std::uint64_t i = 0; i < spec.items; ++i) ++seen[static_cast<int>(source.QuadrantOf(i))];
  for (int n : seen) EXPECT_GT(n, 50);
}

TEST(Synth, WritesReadableBundles) {
  testing::TempDir dir;
  SynthSpec spec;
  spec.items = 20;
  spec.dim = 12;
  const auto out = WriteSynthBundles(spec, dir.path());
  auto answers = BundleReader::Open(out.answers);
  auto semantic = BundleReader::Open(out.semantic);
  EXPECT_EQ(answers.header().kind, BundleKind::kAnswers);
  EXPECT_EQ(answers.item_count(), 20u);
  EXPECT_EQ(answers.vectors_per_item(), 5u);
  EXPECT_EQ(semantic.header().kind, BundleKind::kSemantic);
  EXPECT_EQ(semantic.dim(), 16u);
  SynthAnswerSource source(spec);
  std::vector<float> x(5 * 12);
  source.Read(7, x);
  EXPECT_EQ(answers.Item(7), x);
}

TEST(Synth, RejectsBadSpecs) {
  SynthSpec spec;
  spec.dim = 6;
  EXPECT_THROW(SynthAnswerSource{spec}, Error);
  spec.dim = 64;
  spec.k = 1;
  EXPECT_THROW(SynthAnswerSource{spec}, Error);
}

}  // namespace
}  // namespace adg
