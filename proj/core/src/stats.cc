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

#include "adg/stats.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace adg {

Distribution Summarize(std::span<const double> values) {
  Distribution out;
  if (values.empty()) return out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  out.min = sorted.front();
  out.max = sorted.back();
  double sum = 0.0;
  for (double v : sorted) sum += v;
  out.mean = sum / static_cast<double>(sorted.size());
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t q = 0; q < out.deciles.size(); ++q) {
    const double pos = last * static_cast<double>(q + 1) / 10.0;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.deciles[q] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  return out;
}

}  // namespace adg
