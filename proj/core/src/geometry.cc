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

#include "adg/geometry.h"

#include <cmath>

#include <fmt/format.h>

#include "adg/error.h"

namespace adg {
namespace {

void CheckShape(std::size_t size, std::size_t k, std::size_t d) {
  if (k < 2) throw Error(ErrorKind::kDomain, fmt::format("need K >= 2 answers, got {}", k));
  if (d < 1) throw Error(ErrorKind::kDomain, "answer dimension must be >= 1");
  if (size != k * d) {
    throw Error(ErrorKind::kLength,
                fmt::format("answer block has {} values, expected {} x {}", size, k, d));
  }
}

template <typename T>
void NormalizeImpl(std::span<const T> raw, std::size_t k, std::size_t d,
                           std::vector<double>& values, std::vector<double>& norms) {
  CheckShape(raw.size(), k, d);
  values.resize(k * d);
  norms.resize(k);
  for (std::size_t r = 0; r < k; ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double x = static_cast<double>(raw[r * d + j]);
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::kData,
                    fmt::format("non-finite value in answer {} at dim {}", r, j));
      }
      sq += x * x;
    }
    const double norm = std::sqrt(sq);
    if (!(norm > kMinAnswerNorm)) {
      throw Error(ErrorKind::kDegenerateAnswer,
                  fmt::format("answer {} has near-zero norm {:.3g}", r, norm));
    }
    norms[r] = norm;
    for (std::size_t j = 0; j < d; ++j) {
      values[r * d + j] = static_cast<double>(raw[r * d + j]) / norm;
    }
  }
}

}  // namespace

AnswerMatrix NormalizeAnswers(std::span<const double> raw, std::size_t k, std::size_t d) {
  AnswerMatrix m;
  NormalizeImpl(raw, k, d, m.values_, m.source_norms_);
  m.count_ = k;
  m.dim_ = d;
  return m;
}

AnswerMatrix NormalizeAnswers(std::span<const float> raw, std::size_t k, std::size_t d) {
  std::vector<double> widened(raw.begin(), raw.end());
  return NormalizeAnswers(std::span<const double>(widened), k, d);
}

CenteredGram CenteredGramOfRows(std::span<const double> rows, std::size_t k, std::size_t d) {
  CheckShape(rows.size(), k, d);

  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += rows[r * d + j];
  }
  const double inv_k = 1.0 / static_cast<double>(k);
  double mean_sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    mean[j] *= inv_k;
    mean_sq += mean[j] * mean[j];
  }

  // Centre the offsets from row 0 rather than the rows themselves. Same W in
  // exact arithmetic, but coincident rows give exact zeros and a large
  // common offset never enters the subtraction.
  std::vector<double> centered(k * d);
  std::vector<double> offset_mean(d, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      centered[r * d + j] = rows[r * d + j] - rows[j];
      offset_mean[j] += centered[r * d + j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) offset_mean[j] *= inv_k;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < d; ++j) centered[r * d + j] -= offset_mean[j];
  }

  CenteredGram gram;
  gram.k = k;
  gram.matrix.assign(k * k, 0.0);
  gram.mean_sq_norm = mean_sq;
  for (std::size_t a = 0; a < k; ++a) {
    const double* wa = centered.data() + a * d;
    for (std::size_t b = a; b < k; ++b) {
      const double* wb = centered.data() + b * d;
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += wa[j] * wb[j];
      gram.matrix[a * k + b] = dot;
      gram.matrix[b * k + a] = dot;
    }
  }
  // Each entry is computed once for both triangles, so (S + S^T)/2 == S
  // holds exactly.
  for (std::size_t a = 0; a < k; ++a) gram.trace += gram.matrix[a * k + a];
  return gram;
}

CenteredGram ComputeCenteredGram(const AnswerMatrix& answers) {
  return CenteredGramOfRows(answers.values(), answers.count(), answers.dim());
}

}  // namespace adg
