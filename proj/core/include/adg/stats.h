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

#ifndef ADG_STATS_H_
#define ADG_STATS_H_

#include <array>
#include <span>

namespace adg {

struct Distribution {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // 10th, 20th, ..., 90th percentiles, linearly interpolated between order
  // statistics.
  std::array<double, 9> deciles{};
};

// Summary of a non-empty sample; an empty sample yields all zeros.
Distribution Summarize(std::span<const double> values);

}  // namespace adg

#endif  // ADG_STATS_H_
