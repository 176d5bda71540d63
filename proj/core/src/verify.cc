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

#include "adg/verify.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "adg/bundle.h"
#include "adg/error.h"
#include "adg/geometry.h"
#include "adg/kmeans.h"
#include "adg/prng.h"
#include "adg/quota.h"
#include "adg/scoring.h"
#include "adg/synth.h"

namespace adg {
namespace {

using GramFn = std::function<CenteredGram(std::span<const double>, std::size_t, std::size_t)>;
using QuotaFn = std::function<std::vector<std::uint64_t>(std::span<const std::uint64_t>, std::uint64_t)>;

// Uncentered Gram V V^T, the skip-centering defect.
CenteredGram UncenteredGram(std::span<const double> rows, std::size_t k, std::size_t d) {
  CenteredGram g = CenteredGramOfRows(rows, k, d);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += rows[a * d + j] * rows[b * d + j];
      g.matrix[a * k + b] = dot;
    }
  }
  g.trace = 0.0;
  for (std::size_t a = 0; a < k; ++a) g.trace += g.matrix[a * k + a];
  return g;
}

// C (V V^T) C with C = I - (1/K) 1 1^T, evaluated as two dense products.
std::vector<double> ProjectedGram(std::span<const double> rows, std::size_t k, std::size_t d) {
  std::vector<double> s(k * k), c(k * k), cs(k * k, 0.0), out(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += rows[a * d + j] * rows[b * d + j];
      s[a * k + b] = dot;
      c[a * k + b] = (a == b ? 1.0 : 0.0) - 1.0 / static_cast<double>(k);
    }
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t m = 0; m < k; ++m)
      for (std::size_t b = 0; b < k; ++b) cs[a * k + b] += c[a * k + m] * s[m * k + b];
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t m = 0; m < k; ++m)
      for (std::size_t b = 0; b < k; ++b) out[a * k + b] += cs[a * k + m] * c[m * k + b];
  return out;
}

std::vector<std::uint64_t> NaiveRoundedQuotas(std::span<const std::uint64_t> sizes,
                                              std::uint64_t budget) {
  std::uint64_t n = 0;
  for (auto s : sizes) n += s;
  std::vector<std::uint64_t> q(sizes.size());
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    q[b] = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(budget) * static_cast<double>(sizes[b]) /
                     static_cast<double>(n)));
  }
  return q;
}

std::vector<double> RandomUnitRows(std::size_t k, std::size_t d, SplitMix64& rng) {
  std::vector<double> rows(k * d);
  for (std::size_t a = 0; a < k; ++a) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      rows[a * d + j] = rng.NextGaussian();
      sq += rows[a * d + j] * rows[a * d + j];
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < d; ++j) rows[a * d + j] *= inv;
  }
  return rows;
}

// Random orthogonal d x d matrix by Gram-Schmidt on Gaussian columns.
std::vector<double> RandomOrthogonal(std::size_t d, SplitMix64& rng) {
  std::vector<double> q(d * d);
  for (std::size_t c = 0; c < d; ++c) {
    for (;;) {
      for (std::size_t r = 0; r < d; ++r) q[r * d + c] = rng.NextGaussian();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          double dot = 0.0;
          for (std::size_t r = 0; r < d; ++r) dot += q[r * d + c] * q[r * d + p];
          for (std::size_t r = 0; r < d; ++r) q[r * d + c] -= dot * q[r * d + p];
        }
      }
      double sq = 0.0;
      for (std::size_t r = 0; r < d; ++r) sq += q[r * d + c] * q[r * d + c];
      if (sq > 1e-8) {
        const double inv = 1.0 / std::sqrt(sq);
        for (std::size_t r = 0; r < d; ++r) q[r * d + c] *= inv;
        break;
      }
    }
  }
  return q;
}

struct Scores {
  double d, i, s;
};

// Scores from a Gram produced by `gram`, dispersion in trace form.
Scores ScoreRows(const GramFn& gram, std::span<const double> rows, std::size_t k, std::size_t d,
                 const ScoreConfig& cfg) {
  const CenteredGram g = gram(rows, k, d);
  const GramScores s = ScoreGram(g, cfg);
  return {s.dispersion, s.anisotropy, s.score};
}

class Suite {
 public:
  Suite(const VerifyOptions& options) : options_(options) {
    gram_ = options.fault == Fault::kSkipCentering ? GramFn(UncenteredGram)
                                                   : GramFn(CenteredGramOfRows);
    quotas_ = options.fault == Fault::kNaiveRounding
                  ? QuotaFn(NaiveRoundedQuotas)
                  : QuotaFn([](std::span<const std::uint64_t> sizes, std::uint64_t m) {
                      return AllocateQuotas(sizes, m).quotas;
                    });
  }

  std::vector<CheckResult> Run() {
    Check("d_identity", [&] { return DIdentity(); });
    Check("hand_constants", [&] { return HandConstants(); });
    Check("gram_path_equivalence", [&] { return PathEquivalence(); });
    Check("translation_invariance", [&] { return Translation(); });
    Check("rotation_invariance", [&] { return Rotation(); });
    Check("rescale_invariance", [&] { return Rescale(); });
    Check("eigen_oracle", [&] { return EigenOracle(); });
    Check("quota_exactness", [&] { return QuotaExactness(); });
    Check("determinism", [&] { return Determinism(); });
    return std::move(results_);
  }

 private:
  void Check(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{name, false, ""};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
      if (r.passed) r.detail = "ok";
    } catch (const std::exception& e) {
      r.detail = fmt::format("exception: {}", e.what());
    }
    results_.push_back(std::move(r));
  }

  SplitMix64 Rng(std::uint64_t stream) const { return SplitMix64::ForStream(options_.seed, stream); }

  std::string DIdentity() {
    SplitMix64 rng = Rng(1);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t k = 2 + rng.NextBelow(7);
      const std::size_t d = 3 + rng.NextBelow(62);
      const auto rows = RandomUnitRows(k, d, rng);
      const CenteredGram g = gram_(rows, k, d);
      worst = std::max(worst, std::abs((1.0 - g.mean_sq_norm) - g.trace / static_cast<double>(k)));
    }
    if (worst > 1e-6) return fmt::format("max |1-|mu|^2 - tr/K| = {:.3g} > 1e-6", worst);
    return {};
  }

  std::string HandConstants() {
    const ScoreConfig cfg;
    const std::vector<double> ortho = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const std::vector<double> collinear = {1, 0, 0, -1, 0, 0, 1, 0, 0};
    const std::vector<double> same = {0.6, 0.8, 0, 0.6, 0.8, 0, 0.6, 0.8, 0};
    const Scores a = ScoreRows(gram_, ortho, 3, 3, cfg);
    const Scores b = ScoreRows(gram_, collinear, 3, 3, cfg);
    const Scores c = ScoreRows(gram_, same, 3, 3, cfg);
    std::string out;
    if (std::abs(a.d - 2.0 / 3.0) > 1e-9 || std::abs(a.i - 0.5) > 1e-9) {
      out += fmt::format("orthonormal triple D={:.12g} I={:.12g}; ", a.d, a.i);
    }
    if (std::abs(b.d - 8.0 / 9.0) > 1e-9 || b.i > 1e-9) {
      out += fmt::format("collinear triple D={:.12g} I={:.12g}; ", b.d, b.i);
    }
    if (c.d != 0.0 || c.i != 0.0 || c.s != 0.0) {
      out += fmt::format("identical answers D={:.3g} I={:.3g} s={:.3g}; ", c.d, c.i, c.s);
    }
    return out;
  }

  std::string PathEquivalence() {
    SplitMix64 rng = Rng(2);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const std::size_t k = 2 + rng.NextBelow(7);
      const std::size_t d = 3 + rng.NextBelow(62);
      const auto rows = RandomUnitRows(k, d, rng);
      const CenteredGram g = gram_(rows, k, d);
      const auto projected = ProjectedGram(rows, k, d);
      for (std::size_t e = 0; e < k * k; ++e) worst = std::max(worst, std::abs(g.matrix[e] - projected[e]));
    }
    if (worst > 1e-10) return fmt::format("max |W W^T - C S C| = {:.3g} > 1e-10", worst);
    return {};
  }

  template <typename Transform>
  std::string Invariance(std::uint64_t stream, double tolerance, Transform transform) {
    SplitMix64 rng = Rng(stream);
    const ScoreConfig cfg;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t k = 2 + rng.NextBelow(7);
      const std::size_t d = 3 + rng.NextBelow(30);
      const auto rows = RandomUnitRows(k, d, rng);
      const auto moved = transform(rows, k, d, rng);
      const Scores a = ScoreRows(gram_, rows, k, d, cfg);
      const Scores b = ScoreRows(gram_, moved, k, d, cfg);
      worst = std::max({worst, std::abs(a.d - b.d), std::abs(a.i - b.i), std::abs(a.s - b.s)});
    }
    if (worst > tolerance) return fmt::format("max score change {:.3g} > {:.0e}", worst, tolerance);
    return {};
  }

  std::string Translation() {
    return Invariance(3, 1e-9, [](const std::vector<double>& rows, std::size_t k, std::size_t d,
                                   SplitMix64& rng) {
      std::vector<double> shift(d);
      for (double& x : shift) x = 2.0 * rng.NextGaussian();
      auto out = rows;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = 0; j < d; ++j) out[a * d + j] += shift[j];
      return out;
    });
  }

  std::string Rotation() {
    return Invariance(4, 1e-9, [](const std::vector<double>& rows, std::size_t k, std::size_t d,
                                   SplitMix64& rng) {
      const auto q = RandomOrthogonal(d, rng);
      std::vector<double> out(k * d, 0.0);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t m = 0; m < d; ++m)
          for (std::size_t j = 0; j < d; ++j) out[a * d + j] += rows[a * d + m] * q[m * d + j];
      return out;
    });
  }

  std::string Rescale() {
    SplitMix64 rng = Rng(5);
    const ScoreConfig cfg;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t k = 2 + rng.NextBelow(7);
      const std::size_t d = 3 + rng.NextBelow(30);
      std::vector<double> raw(k * d);
      for (double& x : raw) x = rng.NextGaussian();
      auto scaled = raw;
      for (std::size_t a = 0; a < k; ++a) {
        const double factor = std::exp(4.0 * rng.NextGaussian());
        for (std::size_t j = 0; j < d; ++j) scaled[a * d + j] *= factor;
      }
      const AnswerMatrix va = NormalizeAnswers(std::span<const double>(raw), k, d);
      const AnswerMatrix vb = NormalizeAnswers(std::span<const double>(scaled), k, d);
      const Scores a = ScoreRows(gram_, va.values(), k, d, cfg);
      const Scores b = ScoreRows(gram_, vb.values(), k, d, cfg);
      worst = std::max({worst, std::abs(a.d - b.d), std::abs(a.i - b.i), std::abs(a.s - b.s)});
    }
    if (worst > 1e-12) return fmt::format("max score change {:.3g} > 1e-12", worst);
    return {};
  }

  std::string EigenOracle() {
    SplitMix64 rng = Rng(6);
    const ScoreConfig cfg;
    constexpr std::size_t k = 5;
    double worst_trace = 0.0, worst_frob = 0.0, worst_residual = 0.0, worst_bound = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t d = 3 + rng.NextBelow(62);
      const auto rows = RandomUnitRows(k, d, rng);
      const CenteredGram g = gram_(rows, k, d);
      const EigenSpectrum spectrum = EigSymmetric(g, cfg);
      double sum = 0.0, sum_sq = 0.0, frob = 0.0;
      for (double v : spectrum.values) {
        sum += v;
        sum_sq += v * v;
      }
      for (double x : g.matrix) frob += x * x;
      const double scale = std::max(g.trace, 1e-300);
      worst_trace = std::max(worst_trace, std::abs(sum - g.trace) / scale);
      worst_frob = std::max(worst_frob, std::abs(sum_sq - frob) / std::max(frob, 1e-300));
      worst_residual = std::max(worst_residual, spectrum.residual / scale);
      worst_bound = std::max(worst_bound, Anisotropy(spectrum, cfg) - (k - 2.0) / (k - 1.0));
    }
    std::string out;
    if (worst_trace > 1e-8) out += fmt::format("trace rel err {:.3g}; ", worst_trace);
    if (worst_frob > 1e-8) out += fmt::format("Frobenius rel err {:.3g}; ", worst_frob);
    if (worst_residual > 1e-8) out += fmt::format("reconstruction rel err {:.3g}; ", worst_residual);
    if (worst_bound > 1e-9) out += fmt::format("anisotropy bound exceeded by {:.3g}; ", worst_bound);
    return out;
  }

  std::string QuotaExactness() {
    struct Known {
      std::vector<std::uint64_t> sizes;
      std::uint64_t budget;
      std::vector<std::uint64_t> expected;
    };
    const Known known[] = {{{7, 3}, 4, {3, 1}}, {{5, 5}, 3, {2, 1}}, {{1, 9}, 5, {1, 4}}};
    std::string out;
    for (const auto& c : known) {
      const auto q = quotas_(c.sizes, c.budget);
      if (q != c.expected) {
        out += fmt::format("sizes ({}) M={} gave ({}) expected ({}); ", fmt::join(c.sizes, ","),
                           c.budget, fmt::join(q, ","), fmt::join(c.expected, ","));
      }
    }
    SplitMix64 rng = Rng(7);
    std::size_t violations = 0;
    for (int t = 0; t < 10000; ++t) {
      const std::uint64_t bins = 1 + rng.NextBelow(2000);
      const std::uint64_t n = bins + rng.NextBelow(100000 - bins + 1);
      std::vector<std::uint64_t> cuts(bins - 1);
      for (auto& c : cuts) c = rng.NextBelow(n + 1);
      std::sort(cuts.begin(), cuts.end());
      std::vector<std::uint64_t> sizes(bins);
      std::uint64_t prev = 0;
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        sizes[b] = cuts[b] - prev;
        prev = cuts[b];
      }
      sizes[bins - 1] = n - prev;
      const std::uint64_t budget = rng.NextBelow(n + 1);
      const auto q = quotas_(sizes, budget);
      std::uint64_t sum = 0;
      bool ok = q.size() == sizes.size();
      for (std::size_t b = 0; ok && b < q.size(); ++b) {
        sum += q[b];
        ok = q[b] <= sizes[b];
      }
      if (!ok || sum != budget) ++violations;
    }
    if (violations > 0) out += fmt::format("{} of 10000 random configurations violated sum/cap", violations);
    return out;
  }

  std::string Determinism() {
    SynthSpec spec;
    spec.items = 400;
    spec.seed = options_.seed;
    const SynthAnswerSource answers(spec);
    const ScoreConfig cfg;
    const PoolResult one = ScorePool(answers, cfg, {1, false});
    const PoolResult many = ScorePool(answers, cfg, {4, false});
    std::string out;
    if (one.records != many.records) out += "scores differ between 1 and 4 threads; ";

    const SynthSemanticSource semantic(spec);
    KMeansConfig km;
    km.bins = 20;
    km.seed = options_.seed;
    km.threads = 1;
    const BinAssignment a = KMeansFit(semantic, km);
    km.threads = 3;
    const BinAssignment b = KMeansFit(semantic, km);
    if (a.assignment != b.assignment || a.inertia != b.inertia) {
      out += "k-means differs between 1 and 3 threads; ";
    }
    return out;
  }

  VerifyOptions options_;
  GramFn gram_;
  QuotaFn quotas_;
  std::vector<CheckResult> results_;
};

}  // namespace

std::optional<Fault> ParseFault(std::string_view name) {
  if (name == "none") return Fault::kNone;
  if (name == "skip-centering") return Fault::kSkipCentering;
  if (name == "naive-rounding") return Fault::kNaiveRounding;
  return std::nullopt;
}

std::string_view FaultName(Fault fault) {
  switch (fault) {
    case Fault::kNone: return "none";
    case Fault::kSkipCentering: return "skip-centering";
    case Fault::kNaiveRounding: return "naive-rounding";
  }
  return "none";
}

std::vector<CheckResult> RunVerification(const VerifyOptions& options) {
  return Suite(options).Run();
}

}  // namespace adg
