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

#include "adg/kmeans.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "adg/bundle.h"
#include "adg/error.h"
#include "adg/parallel.h"
#include "adg/prng.h"

namespace adg {
namespace {

constexpr std::size_t kAssignChunk = 512;

inline double SquaredDistance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return sum;
}

class Lloyd {
 public:
  Lloyd(std::vector<double> points, std::size_t n, std::size_t dim, const KMeansConfig& cfg)
      : points_(std::move(points)),
        n_(n),
        dim_(dim),
        bins_(cfg.bins),
        cfg_(cfg),
        centroids_(static_cast<std::size_t>(cfg.bins) * dim, 0.0),
        assignment_(n, 0),
        distance_(n, 0.0) {}

  BinAssignment Run() {
    Seed();
    BinAssignment out;
    out.prng = std::string(SplitMix64::kAlgorithmId);
    double inertia = Assign();
    out.inertia_history.push_back(inertia);
    int iterations = 0;
    while (iterations < cfg_.max_iterations) {
      UpdateCentroids();
      const double next = Assign();
      ++iterations;
      out.inertia_history.push_back(next);
      const double previous = inertia;
      inertia = next;
      if (previous <= 0.0 || (previous - next) / previous < cfg_.rel_inertia_tol) break;
    }
    out.assignment = std::move(assignment_);
    out.centroids = std::move(centroids_);
    out.dim = dim_;
    out.inertia = inertia;
    out.iterations_run = iterations;
    return out;
  }

 private:
  const double* point(std::size_t i) const { return points_.data() + i * dim_; }
  double* centroid(std::size_t b) { return centroids_.data() + b * dim_; }

  void SetCentroid(std::size_t b, std::size_t i) {
    std::copy(point(i), point(i) + dim_, centroid(b));
  }

  // k-means++: first centre uniform, then each next centre drawn with
  // probability proportional to squared distance from the chosen set.
  void Seed() {
    SplitMix64 rng(cfg_.seed);
    std::vector<bool> chosen(n_, false);
    std::size_t first = static_cast<std::size_t>(rng.NextBelow(n_));
    SetCentroid(0, first);
    chosen[first] = true;
    std::vector<double> nearest(n_);
    ParallelChunks(n_, kAssignChunk, cfg_.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        nearest[i] = SquaredDistance(point(i), centroids_.data(), dim_);
      }
    });

    for (std::size_t b = 1; b < bins_; ++b) {
      double total = 0.0;
      for (std::size_t i = 0; i < n_; ++i) total += nearest[i];
      std::size_t pick = n_;
      if (total > 0.0) {
        const double target = rng.NextUniform() * total;
        double running = 0.0;
        std::size_t last_positive = n_;
        for (std::size_t i = 0; i < n_; ++i) {
          if (nearest[i] <= 0.0) continue;
          last_positive = i;
          running += nearest[i];
          if (running > target) {
            pick = i;
            break;
          }
        }
        if (pick == n_) pick = last_positive;
      } else {
        // Every point coincides with a centre already; take the lowest
        // unused index so bins stay distinct rows.
        for (std::size_t i = 0; i < n_; ++i) {
          if (!chosen[i]) {
            pick = i;
            break;
          }
        }
      }
      chosen[pick] = true;
      SetCentroid(b, pick);
      const double* c = centroid(b);
      ParallelChunks(n_, kAssignChunk, cfg_.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const double dist = SquaredDistance(point(i), c, dim_);
          if (dist < nearest[i]) nearest[i] = dist;
        }
      });
    }
  }

  // Nearest-centroid assignment; returns inertia summed in chunk order.
  double Assign() {
    const std::size_t chunks = (n_ + kAssignChunk - 1) / kAssignChunk;
    std::vector<double> partial(chunks, 0.0);
    ParallelChunks(n_, kAssignChunk, cfg_.threads, [&](std::size_t begin, std::size_t end) {
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const double* x = point(i);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_bin = 0;
        for (std::size_t b = 0; b < bins_; ++b) {
          const double dist = SquaredDistance(x, centroids_.data() + b * dim_, dim_);
          if (dist < best) {
            best = dist;
            best_bin = static_cast<std::uint32_t>(b);
          }
        }
        assignment_[i] = best_bin;
        distance_[i] = best;
        sum += best;
      }
      partial[begin / kAssignChunk] = sum;
    });
    double inertia = 0.0;
    for (double p : partial) inertia += p;
    return inertia;
  }

  void UpdateCentroids() {
    std::vector<double> sums(bins_ * dim_, 0.0);
    std::vector<std::uint64_t> counts(bins_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t b = assignment_[i];
      ++counts[b];
      const double* x = point(i);
      double* s = sums.data() + b * dim_;
      for (std::size_t j = 0; j < dim_; ++j) s[j] += x[j];
    }

    for (std::size_t b = 0; b < bins_; ++b) {
      if (counts[b] != 0) continue;
      // Reseed from the point farthest from its centroid whose removal
      // does not empty another bin.
      std::size_t far = n_;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (counts[assignment_[i]] > 1 && distance_[i] > far_dist) {
          far = i;
          far_dist = distance_[i];
        }
      }
      if (far == n_) continue;
      const std::size_t old = assignment_[far];
      const double* x = point(far);
      double* s_old = sums.data() + old * dim_;
      double* s_new = sums.data() + b * dim_;
      for (std::size_t j = 0; j < dim_; ++j) {
        s_old[j] -= x[j];
        s_new[j] = x[j];
      }
      --counts[old];
      counts[b] = 1;
      assignment_[far] = static_cast<std::uint32_t>(b);
      distance_[far] = 0.0;
    }

    for (std::size_t b = 0; b < bins_; ++b) {
      if (counts[b] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[b]);
      double* c = centroid(b);
      const double* s = sums.data() + b * dim_;
      for (std::size_t j = 0; j < dim_; ++j) c[j] = s[j] * inv;
    }
  }

  std::vector<double> points_;
  std::size_t n_;
  std::size_t dim_;
  std::size_t bins_;
  KMeansConfig cfg_;
  std::vector<double> centroids_;
  std::vector<std::uint32_t> assignment_;
  std::vector<double> distance_;
};

}  // namespace

std::vector<std::uint64_t> BinAssignment::BinSizes() const {
  std::vector<std::uint64_t> sizes(bins(), 0);
  for (auto b : assignment) ++sizes.at(b);
  return sizes;
}

BinAssignment KMeansFit(std::span<const double> points, std::size_t n, std::size_t dim,
                        const KMeansConfig& cfg) {
  if (cfg.bins == 0) throw Error(ErrorKind::kConfig, "k-means needs at least one bin");
  if (cfg.bins > n) {
    throw Error(ErrorKind::kConfig,
                fmt::format("k-means bins ({}) exceed the number of points ({})", cfg.bins, n));
  }
  if (cfg.max_iterations < 1) throw Error(ErrorKind::kConfig, "max_iterations must be >= 1");
  if (dim == 0 || points.size() != n * dim) {
    throw Error(ErrorKind::kLength,
                fmt::format("k-means input has {} values, expected {} x {}", points.size(), n, dim));
  }

  std::vector<double> data(points.begin(), points.end());
  for (std::size_t i = 0; i < n; ++i) {
    double* row = data.data() + i * dim;
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::isfinite(row[j])) {
        throw Error(ErrorKind::kData,
                    fmt::format("non-finite semantic value at item {}, dim {}", i, j), i);
      }
      sq += row[j] * row[j];
    }
    if (cfg.normalize_inputs && sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
    }
  }
  return Lloyd(std::move(data), n, dim, cfg).Run();
}

BinAssignment KMeansFit(const ItemSource& semantic, const KMeansConfig& cfg) {
  if (semantic.vectors_per_item() != 1) {
    throw Error(ErrorKind::kDomain,
                fmt::format("semantic bundles carry one vector per item, got {}",
                            semantic.vectors_per_item()));
  }
  const std::size_t n = semantic.item_count();
  const std::size_t dim = semantic.dim();
  std::vector<double> points(n * dim);
  std::vector<float> buffer(dim);
  for (std::size_t i = 0; i < n; ++i) {
    semantic.Read(i, buffer);
    std::copy(buffer.begin(), buffer.end(), points.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  return KMeansFit(points, n, dim, cfg);
}

}  // namespace adg
