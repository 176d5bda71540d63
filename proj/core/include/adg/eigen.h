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

#ifndef ADG_EIGEN_H_
#define ADG_EIGEN_H_

#include <cstddef>
#include <span>
#include <vector>

namespace adg {

struct CenteredGram;
struct ScoreConfig;

// Largest matrix order EigSymmetric accepts.
inline constexpr std::size_t kMaxEigenOrder = 64;

struct EigenSpectrum {
  std::vector<double> values;   // non-increasing, clamped to >= 0
  std::vector<double> vectors;  // k x k row-major; column j pairs with values[j]
  double residual = 0.0;        // max |Q diag(raw values) Q^T - S| entry
  int sweeps = 0;

  std::size_t order() const { return values.size(); }
};

// Cyclic Jacobi eigendecomposition of a symmetric positive semidefinite
// matrix. Sweeps until every off-diagonal magnitude is at most
// cfg.eig_tolerance * trace, or throws Error{kSolver} after cfg.max_sweeps.
//
// Eigenvalues in [-1e-8 * max(trace, 1), 0) are clamped to zero; anything
// more negative throws Error{kDomain} as a PSD violation.
EigenSpectrum EigSymmetric(const CenteredGram& gram, const ScoreConfig& cfg);
EigenSpectrum EigSymmetric(std::span<const double> matrix, std::size_t k,
                           const ScoreConfig& cfg);

}  // namespace adg

#endif  // ADG_EIGEN_H_
