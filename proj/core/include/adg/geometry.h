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

#ifndef ADG_GEOMETRY_H_
#define ADG_GEOMETRY_H_

#include <cstddef>
#include <span>
#include <vector>

namespace adg {

// K unit-norm answer vectors of dimension d, stored row-major in double
// precision, together with the norms the raw vectors had before scaling.
class AnswerMatrix {
 public:
  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t k) const {
    return {values_.data() + k * dim_, dim_};
  }
  std::span<const double> values() const { return values_; }
  std::span<const double> source_norms() const { return source_norms_; }

 private:
  friend AnswerMatrix NormalizeAnswers(std::span<const double>, std::size_t, std::size_t);

  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<double> source_norms_;
};

// Rows with norm <= this are rejected as degenerate answers.
inline constexpr double kMinAnswerNorm = 1e-12;

// Divides each of the `k` rows of `raw` (row-major, k x d) by its L2 norm.
// Requires k >= 2, finite entries, and every row norm > kMinAnswerNorm;
// throws Error{kDegenerateAnswer} naming the first offending row.
AnswerMatrix NormalizeAnswers(std::span<const double> raw, std::size_t k, std::size_t d);
AnswerMatrix NormalizeAnswers(std::span<const float> raw, std::size_t k, std::size_t d);

// Centered similarity matrix S_c = W W^T with W = V - 1 mu^T.
struct CenteredGram {
  std::size_t k = 0;
  std::vector<double> matrix;  // k x k, row-major, exactly symmetric
  double mean_sq_norm = 0.0;   // ||mu||^2
  double trace = 0.0;

  double at(std::size_t i, std::size_t j) const { return matrix[i * k + j]; }
};

CenteredGram ComputeCenteredGram(const AnswerMatrix& answers);

// Same computation on arbitrary rows (not required to be unit norm). All
// sums run left to right in index order, so the result does not depend on
// how callers parallelize across instructions.
CenteredGram CenteredGramOfRows(std::span<const double> rows, std::size_t k, std::size_t d);

}  // namespace adg

#endif  // ADG_GEOMETRY_H_
