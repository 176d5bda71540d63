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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Reference values come from oracle.h, not from the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include <fmt/format.h>

#include "adg/bundle.h"
#include "adg/eigen.h"
#include "adg/error.h"
#include "adg/geometry.h"
#include "adg/pipeline.h"
#include "adg/quota.h"
#include "adg/scoring.h"
#include "adg/synth.h"
#include "oracle.h"

namespace {

using namespace adg;
using testing::RandomOrthogonal;
using testing::RandomUnitRows;

struct Outcome {
  bool passed = true;
  std::string detail;
  void Fail(const std::string& why) {
    if (passed) detail = why;
    passed = false;
  }
};

double SquaredMeanNorm(const std::vector<double>& rows, std::size_t k, std::size_t d) {
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t a = 0; a < k; ++a) m += rows[a * d + j];
    m /= double(k);
    sq += m * m;
  }
  return sq;
}

Outcome DispersionIdentity() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 2 + rng() % 7, d = 3 + rng() % 62;
    const auto rows = RandomUnitRows(k, d, rng);
    const auto gram = CenteredGramOfRows(rows, k, d);
    const double lhs = 1.0 - SquaredMeanNorm(rows, k, d);
    worst = std::max(worst, std::abs(lhs - gram.trace / double(k)));
    worst = std::max(worst, std::abs(Dispersion(gram) - lhs));
  }
  if (worst > 1e-6) o.Fail(fmt::format("max deviation {:.3g}", worst));
  else o.detail = fmt::format("max deviation {:.3g}", worst);
  return o;
}

Outcome HandConstants() {
  Outcome o;
  const ScoreConfig cfg;
  const auto ortho = ScoreInstruction(std::vector<double>{1, 0, 0, 0, 1, 0, 0, 0, 1}, 3, 3, cfg);
  if (std::abs(ortho.dispersion - 2.0 / 3.0) > 1e-9) o.Fail(fmt::format("orthonormal D {}", ortho.dispersion));
  if (std::abs(ortho.anisotropy - 0.5) > 1e-9) o.Fail(fmt::format("orthonormal I {}", ortho.anisotropy));
  const auto line = ScoreInstruction(std::vector<double>{1, 0, -1, 0, 1, 0}, 3, 2, cfg);
  if (std::abs(line.dispersion - 8.0 / 9.0) > 1e-9) o.Fail(fmt::format("collinear D {}", line.dispersion));
  if (line.anisotropy > 1e-9) o.Fail(fmt::format("collinear I {}", line.anisotropy));
  std::vector<double> same;
  for (int k = 0; k < 5; ++k) same.insert(same.end(), {0.0, 3.0, 4.0});
  const auto flat = ScoreInstruction(same, 5, 3, cfg);
  if (flat.dispersion != 0.0 || flat.anisotropy != 0.0 || flat.score != 0.0) {
    o.Fail(fmt::format("identical answers D={} I={} s={}", flat.dispersion, flat.anisotropy, flat.score));
  }
  if (o.passed) o.detail = "orthonormal, collinear and identical cases exact";
  return o;
}

Outcome Invariance() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal;
  const ScoreConfig cfg;
  double worst_move = 0.0, worst_turn = 0.0, worst_scale = 0.0;
  auto diff = [](const GramScores& a, const GramScores& b) {
    return std::max({std::abs(a.dispersion - b.dispersion), std::abs(a.anisotropy - b.anisotropy),
                     std::abs(a.score - b.score)});
  };
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng() % 7, d = 3 + rng() % 62;
    const auto rows = RandomUnitRows(k, d, rng);
    const auto base = ScoreGram(CenteredGramOfRows(rows, k, d), cfg);
    auto moved = rows;
    std::vector<double> c(d);
    for (auto& x : c) x = 5.0 * normal(rng);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t j = 0; j < d; ++j) moved[a * d + j] += c[j];
    worst_move = std::max(worst_move, diff(base, ScoreGram(CenteredGramOfRows(moved, k, d), cfg)));
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng() % 7, d = 3 + rng() % 62;
    const auto rows = RandomUnitRows(k, d, rng);
    const auto base = ScoreGram(CenteredGramOfRows(rows, k, d), cfg);
    const auto turned = testing::MatMul(rows, RandomOrthogonal(d, rng), k, d, d);
    worst_turn = std::max(worst_turn, diff(base, ScoreGram(CenteredGramOfRows(turned, k, d), cfg)));
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + rng() % 7, d = 3 + rng() % 62;
    std::vector<double> h(k * d);
    for (auto& x : h) x = normal(rng);
    auto scaled = h;
    for (std::size_t a = 0; a < k; ++a) {
      const double f = std::exp(4.0 * normal(rng));
      for (std::size_t j = 0; j < d; ++j) scaled[a * d + j] *= f;
    }
    const auto r0 = ScoreInstruction(h, k, d, cfg), r1 = ScoreInstruction(scaled, k, d, cfg);
    worst_scale = std::max({worst_scale, std::abs(r0.dispersion - r1.dispersion),
                            std::abs(r0.anisotropy - r1.anisotropy), std::abs(r0.score - r1.score)});
  }
  o.detail = fmt::format("translation {:.3g}, rotation {:.3g}, rescale {:.3g}", worst_move,
                         worst_turn, worst_scale);
  if (worst_move > 1e-9 || worst_turn > 1e-9 || worst_scale > 1e-12) o.Fail(o.detail);
  return o;
}

Outcome EigenOracle() {
  Outcome o;
  std::mt19937_64 rng(303);
  const ScoreConfig cfg;
  const std::size_t k = 5;
  double worst_trace = 0.0, worst_frob = 0.0, worst_residual = 0.0, worst_bound = -1.0;
  for (int t = 0; t < 1000; ++t) {
    // W with zero column sums, scaled across twelve decades, so S = W W^T is
    // a centered Gram of rank up to K - 1.
    const std::size_t d = 1 + rng() % 64;
    std::normal_distribution<double> normal;
    const double scale = std::pow(10.0, -double(rng() % 12));
    std::vector<double> w(k * d);
    for (auto& x : w) x = scale * normal(rng);
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t a = 0; a < k; ++a) m += w[a * d + j];
      for (std::size_t a = 0; a < k; ++a) w[a * d + j] -= m / double(k);
    }
    const auto s = testing::MatMul(w, testing::Transpose(w, k, d), k, d, k);
    std::vector<double> sym(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sym[i * k + j] = 0.5 * (s[i * k + j] + s[j * k + i]);
    const auto spec = EigSymmetric(sym, k, cfg);
    double trace = 0.0, frob = 0.0, sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += sym[i * k + i];
    for (double x : sym) frob += x * x;
    for (double g : spec.values) sum += g, sum_sq += g * g;
    // Reconstruct independently from the returned pairs.
    double residual = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double v = 0.0;
        for (std::size_t c = 0; c < k; ++c) v += spec.vectors[i * k + c] * spec.values[c] * spec.vectors[j * k + c];
        residual = std::max(residual, std::abs(v - sym[i * k + j]));
      }
    }
    worst_trace = std::max(worst_trace, std::abs(sum - trace) / trace);
    worst_frob = std::max(worst_frob, std::abs(sum_sq - frob) / frob);
    worst_residual = std::max(worst_residual, residual / std::sqrt(frob));
    const double anis = Anisotropy(spec, cfg);
    worst_bound = std::max(worst_bound, anis - double(k - 2) / double(k - 1));
  }
  o.detail = fmt::format("trace {:.3g}, frobenius {:.3g}, residual {:.3g}, bound margin {:.3g}",
                         worst_trace, worst_frob, worst_residual, worst_bound);
  if (worst_trace > 1e-8 || worst_frob > 1e-8 || worst_residual > 1e-8 || worst_bound > 1e-9) {
    o.Fail(o.detail);
  }
  return o;
}

Outcome QuotaExactness() {
  Outcome o;
  using V = std::vector<std::uint64_t>;
  if (AllocateQuotas(V{7, 3}, 4).quotas != V{3, 1}) o.Fail("(7,3) M=4 not (3,1)");
  if (AllocateQuotas(V{5, 5}, 3).quotas != V{2, 1}) o.Fail("(5,5) M=3 not (2,1)");
  std::mt19937_64 rng(404);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t bins = 1 + rng() % 2000;
    const std::uint64_t n = bins + rng() % (100001 - bins);
    // Random composition of n into bins parts, empties allowed.
    V sizes(bins, 0);
    std::uint64_t left = n;
    for (std::size_t b = 0; b + 1 < bins && left > 0; ++b) {
      const std::uint64_t take = rng() % std::min<std::uint64_t>(left + 1, 2 * n / bins + 2);
      sizes[b] = take;
      left -= take;
    }
    sizes[bins - 1] += left;
    std::shuffle(sizes.begin(), sizes.end(), rng);
    const std::uint64_t m = rng() % (n + 1);
    const auto q = AllocateQuotas(sizes, m).quotas;
    std::uint64_t total = 0;
    bool bad = false;
    for (std::size_t b = 0; b < bins; ++b) {
      total += q[b];
      bad |= q[b] > sizes[b];
    }
    violations += bad || total != m;
  }
  if (violations > 0) o.Fail(fmt::format("{} violating configurations", violations));
  else o.detail = "10000 random configurations, 0 violations; worked cases exact";
  return o;
}

Outcome DegenerateBins() {
  Outcome o;
  for (std::uint64_t n : {5u, 12u, 31u, 50u}) {
    SynthSpec spec;
    spec.items = n;
    spec.seed = 1000 + n;
    const SynthAnswerSource answers(spec);
    const SynthSemanticSource semantic(spec);
    const auto records = ScorePool(answers, ScoreConfig{}).records;
    for (std::uint64_t m = 0; m <= n; ++m) {
      SelectParams one;
      one.budget = m;
      one.kmeans.bins = 1;
      std::vector<std::uint64_t> order(n);
      std::iota(order.begin(), order.end(), std::uint64_t{0});
      std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return records[a].score != records[b].score ? records[a].score > records[b].score : a < b;
      });
      order.resize(m);
      std::sort(order.begin(), order.end());
      if (SelectFromRecords(records, semantic, one).manifest.SelectedIds() != order) {
        o.Fail(fmt::format("B=1 differs from global top-M at N={} M={}", n, m));
      }

      SelectParams each;
      each.budget = m;
      each.kmeans.bins = static_cast<std::uint32_t>(n);
      const auto outcome = SelectFromRecords(records, semantic, each);
      const auto q = testing::ReferenceQuotas(std::vector<std::uint64_t>(n, 1), m);
      std::vector<std::uint64_t> expected;
      for (std::uint64_t i = 0; i < n; ++i)
        if (q[outcome.bins.assignment[i]] == 1) expected.push_back(i);
      if (outcome.manifest.SelectedIds() != expected) {
        o.Fail(fmt::format("B=N differs from brute force at N={} M={}", n, m));
      }
    }
  }
  if (o.passed) o.detail = "B=1 and B=N agree for N in {5,12,31,50}, every M";
  return o;
}

Outcome Determinism() {
  Outcome o;
  testing::TempDir dir;
  SynthSpec spec;
  spec.items = 52002;
  spec.k = 5;
  spec.dim = 64;
  spec.seed = 17;
  const auto bundles = WriteSynthBundles(spec, dir / "pool");
  PipelineConfig config;
  config.paths = {bundles.answers, bundles.semantic, dir / "run"};
  config.seed = 17;
  std::vector<std::string> outputs;
  for (unsigned threads : {1u, 1u, 4u}) {
    config.threads = threads;
    config.paths.output_dir = dir / fmt::format("run{}", outputs.size());
    RunPipeline(config);
    outputs.push_back(testing::ReadFile(config.paths.output_dir / kSelectedIdsFile));
  }
  const auto count = std::count(outputs[0].begin(), outputs[0].end(), '\n');
  if (outputs[0] != outputs[1]) o.Fail("repeat run differs");
  if (outputs[0] != outputs[2]) o.Fail("4-thread run differs");
  if (count != 10000) o.Fail(fmt::format("{} ids selected", count));
  if (o.passed) o.detail = "3 runs identical, 10000 selected";
  return o;
}

Outcome QuadrantOrder() {
  Outcome o;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::map<Quadrant, double> mean;
    for (auto q : kAllQuadrants) {
      testing::TempDir dir;
      SynthSpec spec;
      spec.scenario = q;
      spec.items = 25;
      spec.seed = seed;
      const auto bundles = WriteSynthBundles(spec, dir.path());
      const auto records = ScorePool(BundleReader::Open(bundles.answers), ScoreConfig{}).records;
      double total = 0.0;
      for (const auto& r : records) total += r.score;
      mean[q] = total / double(records.size());
    }
    const double hh = mean[Quadrant::kHighDHighI], ll = mean[Quadrant::kLowDLowI];
    const double hl = mean[Quadrant::kHighDLowI], lh = mean[Quadrant::kLowDHighI];
    ok += hh > std::max(hl, lh) && ll < std::min(hl, lh);
  }
  o.detail = fmt::format("{}/20 seeds ordered", ok);
  if (ok != 20) o.Fail(o.detail);
  return o;
}

Outcome ScaleSmoke(double* scoring_seconds) {
  Outcome o;
  SynthSpec spec;
  spec.items = 52002;
  spec.k = 5;
  spec.dim = 4096;
  spec.seed = 23;
  const SynthAnswerSource source(spec);
  const std::uint64_t chunk = 4096;
  const std::size_t floats = std::size_t{spec.k} * spec.dim;
  double seconds = 0.0;
  std::uint64_t scored = 0;
  for (std::uint64_t begin = 0; begin < spec.items; begin += chunk) {
    const std::uint64_t count = std::min(chunk, spec.items - begin);
    std::vector<float> values(count * floats);
    for (std::uint64_t i = 0; i < count; ++i) {
      source.Read(begin + i, std::span(values).subspan(i * floats, floats));
    }
    const MemoryItemSource part(std::move(values), count, spec.k, spec.dim);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = ScorePool(part, ScoreConfig{}, {1, false});
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& r : result.records) {
      const bool valid = r.dispersion >= 0 && r.dispersion <= 1 && r.anisotropy >= 0 &&
                         r.anisotropy <= 0.75 + 1e-9 && r.eigenvalues.size() == 5 &&
                         std::abs(r.score - (0.6 * r.dispersion + 0.4 * r.anisotropy)) < 1e-12;
      if (!valid) o.Fail(fmt::format("record {} breaks invariants", begin + r.id));
    }
    scored += result.records.size();
  }
  *scoring_seconds = seconds;
  if (scored != spec.items) o.Fail(fmt::format("{} records", scored));
  if (seconds > 120.0) o.Fail(fmt::format("scoring took {:.1f}s", seconds));
  if (o.passed) o.detail = fmt::format("52002 x 5 x 4096 scored in {:.1f}s", seconds);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0 means no limit
    std::function<Outcome()> run;
  };
  double scale_seconds = 0.0;
  const Criterion criteria[] = {
      {"dispersion_identity", 5.0, DispersionIdentity},
      {"hand_constants", 0.0, HandConstants},
      {"invariance_suite", 0.0, Invariance},
      {"eigen_oracle", 0.0, EigenOracle},
      {"quota_exactness", 10.0, QuotaExactness},
      {"degenerate_bins", 0.0, DegenerateBins},
      {"determinism", 120.0, Determinism},
      {"quadrant_structure", 0.0, QuadrantOrder},
      {"scale_smoke", 0.0, [&] { return ScaleSmoke(&scale_seconds); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && seconds > c.limit_seconds) {
      o.Fail(fmt::format("took {:.2f}s, limit {:.0f}s", seconds, c.limit_seconds));
    }
    failures += !o.passed;
    std::printf("%s %s (%s; %.2fs)\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
