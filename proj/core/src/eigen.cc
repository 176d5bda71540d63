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

#include "adg/eigen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "adg/error.h"
#include "adg/geometry.h"
#include "adg/scoring.h"

namespace adg {
namespace {

constexpr double kNegativeBand = 1e-8;

double MaxOffDiagonal(const std::vector<double>& a, std::size_t k) {
  double off = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) off = std::max(off, std::abs(a[p * k + q]));
  }
  return off;
}

double OffDiagonalNorm(const std::vector<double>& a, std::size_t k) {
  double sum = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) sum += 2.0 * a[p * k + q] * a[p * k + q];
  }
  return std::sqrt(sum);
}

// Annihilates a[p][q] with one Jacobi rotation and accumulates it into v.
void Rotate(std::vector<double>& a, std::vector<double>& v, std::size_t k, std::size_t p,
            std::size_t q) {
  const double apq = a[p * k + q];
  const double app = a[p * k + p];
  const double aqq = a[q * k + q];
  const double diff = aqq - app;

  double t;
  if (std::abs(apq) * 1e150 < std::abs(diff)) {
    t = apq / diff;
  } else {
    const double theta = 0.5 * diff / apq;
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a[p * k + p] = app - t * apq;
  a[q * k + q] = aqq + t * apq;
  a[p * k + q] = 0.0;
  a[q * k + p] = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    if (r == p || r == q) continue;
    const double arp = a[r * k + p];
    const double arq = a[r * k + q];
    const double new_rp = arp - s * (arq + tau * arp);
    const double new_rq = arq + s * (arp - tau * arq);
    a[r * k + p] = a[p * k + r] = new_rp;
    a[r * k + q] = a[q * k + r] = new_rq;
  }
  for (std::size_t r = 0; r < k; ++r) {
    const double vrp = v[r * k + p];
    const double vrq = v[r * k + q];
    v[r * k + p] = vrp - s * (vrq + tau * vrp);
    v[r * k + q] = vrq + s * (vrp - tau * vrq);
  }
}

}  // namespace

EigenSpectrum EigSymmetric(std::span<const double> matrix, std::size_t k,
                           const ScoreConfig& cfg) {
  cfg.Validate();
  if (k < 1 || k > kMaxEigenOrder) {
    throw Error(ErrorKind::kDomain,
                fmt::format("eigensolver supports 1 <= K <= {}, got {}", kMaxEigenOrder, k));
  }
  if (matrix.size() != k * k) {
    throw Error(ErrorKind::kLength, fmt::format("matrix has {} entries, expected {}", matrix.size(), k * k));
  }
  double scale = 0.0;
  for (double x : matrix) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kData, "non-finite matrix entry");
    scale = std::max(scale, std::abs(x));
  }
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) {
      if (std::abs(matrix[p * k + q] - matrix[q * k + p]) > 1e-12 * std::max(scale, 1.0)) {
        throw Error(ErrorKind::kDomain,
                    fmt::format("matrix is not symmetric at ({}, {})", p, q));
      }
    }
  }

  std::vector<double> a(matrix.begin(), matrix.end());
  // Work on the exact symmetrization so rotations see a symmetric matrix.
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) {
      const double m = 0.5 * (a[p * k + q] + a[q * k + p]);
      a[p * k + q] = a[q * k + p] = m;
    }
  }
  double trace = 0.0;
  for (std::size_t p = 0; p < k; ++p) trace += a[p * k + p];

  std::vector<double> v(k * k, 0.0);
  for (std::size_t p = 0; p < k; ++p) v[p * k + p] = 1.0;

  const double threshold = cfg.eig_tolerance * std::max(trace, 0.0);
  int sweeps = 0;
  while (MaxOffDiagonal(a, k) > threshold) {
    if (sweeps >= cfg.max_sweeps) {
      throw Error(ErrorKind::kSolver,
                  fmt::format("Jacobi did not converge in {} sweeps; off-diagonal norm {:.6g}",
                              cfg.max_sweeps, OffDiagonalNorm(a, k)));
    }
    ++sweeps;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a[p * k + q];
        if (apq == 0.0) continue;
        // Entries below the diagonals' resolution are dropped outright.
        const double g = 100.0 * std::abs(apq);
        if (std::abs(a[p * k + p]) + g == std::abs(a[p * k + p]) &&
            std::abs(a[q * k + q]) + g == std::abs(a[q * k + q])) {
          a[p * k + q] = a[q * k + p] = 0.0;
          continue;
        }
        Rotate(a, v, k, p, q);
      }
    }
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * k + x] > a[y * k + y];
  });

  EigenSpectrum spectrum;
  spectrum.sweeps = sweeps;
  spectrum.values.resize(k);
  spectrum.vectors.resize(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    spectrum.values[j] = a[order[j] * k + order[j]];
    for (std::size_t r = 0; r < k; ++r) spectrum.vectors[r * k + j] = v[r * k + order[j]];
  }

  double residual = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        sum += spectrum.vectors[r * k + j] * spectrum.values[j] * spectrum.vectors[c * k + j];
      }
      residual = std::max(residual, std::abs(sum - matrix[r * k + c]));
    }
  }
  spectrum.residual = residual;

  const double band = kNegativeBand * std::max(trace, 1.0);
  for (double& value : spectrum.values) {
    if (value < -band) {
      throw Error(ErrorKind::kDomain,
                  fmt::format("matrix is not positive semidefinite: eigenvalue {:.6g}", value));
    }
    if (value < 0.0) value = 0.0;
  }
  return spectrum;
}

EigenSpectrum EigSymmetric(const CenteredGram& gram, const ScoreConfig& cfg) {
  return EigSymmetric(gram.matrix, gram.k, cfg);
}

}  // namespace adg
