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

#include <cmath>

#include <fmt/format.h>

#include "adg/error.h"

namespace adg {
namespace {

constexpr double kLowDLowISpread = 0.08;
constexpr double kLowDHighISpread = 0.15;
constexpr double kHighDLowISpread = 1.0;
constexpr double kTopicNoise = 0.25;

// Stream salts keep answers, semantics and topic centres independent.
constexpr std::uint64_t kSemanticSalt = 0x5e3a171c5eedULL;
constexpr std::uint64_t kTopicSalt = 0x70b1c5ULL;

std::vector<double> OrthonormalRows(std::size_t count, std::size_t dim, SplitMix64& rng) {
  std::vector<double> basis(count * dim);
  for (std::size_t r = 0; r < count; ++r) {
    double* row = basis.data() + r * dim;
    for (;;) {
      for (std::size_t j = 0; j < dim; ++j) row[j] = rng.NextGaussian();
      for (std::size_t q = 0; q < r; ++q) {
        const double* prev = basis.data() + q * dim;
        double dot = 0.0;
        for (std::size_t j = 0; j < dim; ++j) dot += row[j] * prev[j];
        for (std::size_t j = 0; j < dim; ++j) row[j] -= dot * prev[j];
      }
      double sq = 0.0;
      for (std::size_t j = 0; j < dim; ++j) sq += row[j] * row[j];
      if (sq > 1e-6) {
        const double inv = 1.0 / std::sqrt(sq);
        for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
        break;
      }
    }
  }
  return basis;
}

void AddNoiseAndNormalize(std::span<double> row, double noise, SplitMix64& rng) {
  const double sigma = noise / std::sqrt(static_cast<double>(row.size()));
  double sq = 0.0;
  for (double& x : row) {
    x += sigma * rng.NextGaussian();
    sq += x * x;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : row) x *= inv;
}

QuadrantScenario MixedScenario(const SynthSpec& spec, SplitMix64& rng, Quadrant* quadrant) {
  QuadrantScenario s;
  s.name = kAllQuadrants[rng.NextBelow(4)];
  s.k = spec.k;
  s.dim = spec.dim;
  const double jitter = 0.5 + rng.NextUniform();
  switch (s.name) {
    case Quadrant::kLowDLowI: s.spread = kLowDLowISpread * jitter; break;
    case Quadrant::kLowDHighI: s.spread = kLowDHighISpread * jitter; break;
    case Quadrant::kHighDLowI: s.spread = kHighDLowISpread * (0.75 + 0.5 * (jitter - 0.5)); break;
    case Quadrant::kHighDHighI:
      s.modes = spec.k >= 3 ? 3 + static_cast<std::uint32_t>(rng.NextBelow(spec.k - 2)) : spec.k;
      break;
  }
  if (quadrant != nullptr) *quadrant = s.name;
  return s;
}

SplitMix64 ItemStream(const SynthSpec& spec, std::uint64_t index) {
  return SplitMix64::ForStream(spec.seed, index);
}

}  // namespace

std::string_view QuadrantName(Quadrant q) {
  switch (q) {
    case Quadrant::kLowDLowI: return "low_D_low_I";
    case Quadrant::kLowDHighI: return "low_D_high_I";
    case Quadrant::kHighDLowI: return "high_D_low_I";
    case Quadrant::kHighDHighI: return "high_D_high_I";
  }
  return "";
}

std::optional<Quadrant> ParseQuadrant(std::string_view name) {
  for (Quadrant q : kAllQuadrants) {
    if (QuadrantName(q) == name) return q;
  }
  return std::nullopt;
}

std::vector<double> GenerateQuadrantAnswers(const QuadrantScenario& s, SplitMix64& rng) {
  const std::size_t k = s.k;
  const std::size_t d = s.dim;
  if (k < 2) throw Error(ErrorKind::kConfig, "scenario needs K >= 2");
  if (d < k + 2) {
    throw Error(ErrorKind::kConfig,
                fmt::format("scenario dimension {} must be at least K + 2 = {}", d, k + 2));
  }
  // Rows: anchor u, drift axis w, then k mode directions.
  const std::vector<double> basis = OrthonormalRows(k + 2, d, rng);
  auto axis = [&](std::size_t r) { return std::span<const double>(basis.data() + r * d, d); };
  const auto u = axis(0);
  const auto w = axis(1);

  std::vector<double> out(k * d, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    std::span<double> row(out.data() + a * d, d);
    switch (s.name) {
      case Quadrant::kLowDLowI: {
        // Tight cluster drifting along one axis.
        const double spread = s.spread > 0.0 ? s.spread : kLowDLowISpread;
        const double t = -1.0 + 2.0 * static_cast<double>(a) / static_cast<double>(k - 1);
        const double offset = spread * (t + 0.1 * rng.NextGaussian());
        for (std::size_t j = 0; j < d; ++j) row[j] = u[j] + offset * w[j];
        break;
      }
      case Quadrant::kLowDHighI: {
        // Small cloud, one orthogonal direction per answer.
        const double radius = s.spread > 0.0 ? s.spread : kLowDHighISpread;
        const auto e = axis(2 + a);
        for (std::size_t j = 0; j < d; ++j) row[j] = u[j] + radius * e[j];
        break;
      }
      case Quadrant::kHighDLowI: {
        // Two far-apart clumps on one great circle through u and w.
        const double half_angle = s.spread > 0.0 ? s.spread : kHighDLowISpread;
        const double angle = half_angle * (1.0 + 0.05 * rng.NextGaussian());
        const double side = a % 2 == 0 ? 1.0 : -1.0;
        const double c = std::cos(angle);
        const double sn = side * std::sin(angle);
        for (std::size_t j = 0; j < d; ++j) row[j] = c * u[j] + sn * w[j];
        break;
      }
      case Quadrant::kHighDHighI: {
        // Well-separated modes on mutually orthogonal directions.
        const std::size_t modes = s.modes == 0 ? k : std::min<std::size_t>(s.modes, k);
        const auto e = axis(2 + a % modes);
        for (std::size_t j = 0; j < d; ++j) row[j] = e[j];
        break;
      }
    }
    AddNoiseAndNormalize(row, s.noise, rng);
  }
  return out;
}

void SynthSpec::Validate() const {
  if (items < 1) throw Error(ErrorKind::kConfig, "synthetic pool needs at least one item");
  if (k < 2) throw Error(ErrorKind::kConfig, "synthetic pool needs K >= 2");
  if (dim < k + 2) {
    throw Error(ErrorKind::kConfig,
                fmt::format("answer dimension {} must be at least K + 2 = {}", dim, k + 2));
  }
  if (semantic_dim < 1 || topics < 1) {
    throw Error(ErrorKind::kConfig, "semantic_dim and topics must be >= 1");
  }
}

SynthAnswerSource::SynthAnswerSource(SynthSpec spec) : spec_(spec) { spec_.Validate(); }

Quadrant SynthAnswerSource::QuadrantOf(std::uint64_t index) const {
  if (spec_.scenario) return *spec_.scenario;
  SplitMix64 rng = ItemStream(spec_, index);
  Quadrant q;
  MixedScenario(spec_, rng, &q);
  return q;
}

void SynthAnswerSource::Read(std::uint64_t index, std::span<float> out) const {
  if (index >= spec_.items || out.size() != static_cast<std::size_t>(spec_.k) * spec_.dim) {
    throw Error(ErrorKind::kDomain, fmt::format("bad read of synthetic item {}", index));
  }
  SplitMix64 rng = ItemStream(spec_, index);
  QuadrantScenario scenario;
  if (spec_.scenario) {
    scenario.name = *spec_.scenario;
    scenario.k = spec_.k;
    scenario.dim = spec_.dim;
  } else {
    scenario = MixedScenario(spec_, rng, nullptr);
  }
  const std::vector<double> answers = GenerateQuadrantAnswers(scenario, rng);
  for (std::size_t i = 0; i < answers.size(); ++i) out[i] = static_cast<float>(answers[i]);
}

SynthSemanticSource::SynthSemanticSource(SynthSpec spec) : spec_(spec) {
  spec_.Validate();
  SplitMix64 rng = SplitMix64::ForStream(spec_.seed ^ kTopicSalt, 0);
  centres_.resize(static_cast<std::size_t>(spec_.topics) * spec_.semantic_dim);
  for (double& x : centres_) x = rng.NextGaussian();
}

void SynthSemanticSource::Read(std::uint64_t index, std::span<float> out) const {
  const std::size_t p = spec_.semantic_dim;
  if (index >= spec_.items || out.size() != p) {
    throw Error(ErrorKind::kDomain, fmt::format("bad read of synthetic item {}", index));
  }
  SplitMix64 rng = SplitMix64::ForStream(spec_.seed ^ kSemanticSalt, index);
  const std::size_t topic = static_cast<std::size_t>(rng.NextBelow(spec_.topics));
  const double* centre = centres_.data() + topic * p;
  for (std::size_t j = 0; j < p; ++j) {
    out[j] = static_cast<float>(centre[j] + kTopicNoise * rng.NextGaussian());
  }
}

void WriteSourceBundle(const std::filesystem::path& path, const ItemSource& source,
                       BundleKind kind, const std::map<std::string, std::string>& metadata) {
  BundleHeader header;
  header.kind = kind;
  header.item_count = source.item_count();
  header.vectors_per_item = source.vectors_per_item();
  header.dim = source.dim();
  header.metadata = metadata;
  BundleWriter writer(path, header);
  std::vector<float> buffer(header.floats_per_item());
  for (std::uint64_t i = 0; i < header.item_count; ++i) {
    source.Read(i, buffer);
    writer.Append(buffer);
  }
  writer.Finish();
}

SynthOutputs WriteSynthBundles(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  spec.Validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  const std::map<std::string, std::string> metadata = {
      {"generator", "synth"},
      {"scenario", spec.scenario ? std::string(QuadrantName(*spec.scenario)) : "mixed"},
      {"seed", std::to_string(spec.seed)},
      {"prng", std::string(SplitMix64::kAlgorithmId)},
  };
  SynthOutputs outputs{out_dir / "answers.adge", out_dir / "semantic.adge"};
  WriteSourceBundle(outputs.answers, SynthAnswerSource(spec), BundleKind::kAnswers, metadata);
  WriteSourceBundle(outputs.semantic, SynthSemanticSource(spec), BundleKind::kSemantic, metadata);
  return outputs;
}

}  // namespace adg
