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

#ifndef ADG_KMEANS_H_
#define ADG_KMEANS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adg {

class ItemSource;

inline constexpr std::uint32_t kDefaultBins = 1000;

struct KMeansConfig {
  std::uint32_t bins = kDefaultBins;
  std::uint64_t seed = 0;
  int max_iterations = 100;
  double rel_inertia_tol = 1e-4;
  bool normalize_inputs = true;
  unsigned threads = 1;  // does not affect results
};

struct BinAssignment {
  std::vector<std::uint32_t> assignment;  // bin of each point, by row
  std::vector<double> centroids;          // bins x dim, row-major
  std::size_t dim = 0;
  double inertia = 0.0;  // of `assignment` against `centroids`
  int iterations_run = 0;
  // Inertia after initialization, then after every Lloyd iteration.
  std::vector<double> inertia_history;
  std::string prng;

  std::uint32_t bins() const {
    return dim == 0 ? 0 : static_cast<std::uint32_t>(centroids.size() / dim);
  }
  std::vector<std::uint64_t> BinSizes() const;
};

// k-means++ seeding followed by Lloyd iterations with squared Euclidean
// distance. Nearest-centroid ties go to the lowest centroid index; a bin
// that empties is reseeded with the point farthest from its centroid.
// Stops when the relative inertia improvement drops below
// cfg.rel_inertia_tol or after cfg.max_iterations.
//
// `points` is n x dim row-major. Throws Error{kConfig} when bins > n or
// bins == 0, and Error{kData} on non-finite input.
BinAssignment KMeansFit(std::span<const double> points, std::size_t n, std::size_t dim,
                        const KMeansConfig& cfg);

// Fits a semantic bundle (one vector per item).
BinAssignment KMeansFit(const ItemSource& semantic, const KMeansConfig& cfg);

}  // namespace adg

#endif  // ADG_KMEANS_H_
