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

#ifndef ADG_QUOTA_H_
#define ADG_QUOTA_H_

#include <cstdint>
#include <span>
#include <vector>

namespace adg {

struct QuotaTable {
  std::vector<std::uint64_t> quotas;
  std::uint64_t budget = 0;
};

// Proportional quotas m_b ~ M * |B_b| / N that sum to M exactly.
//
// Shares are floored, then the leftover units go one each to the bins with
// the largest fractional remainder (ties to the lower bin index). Any quota
// above its bin size is capped and the freed units are redistributed by the
// same rule among uncapped bins. All arithmetic is exact integer math.
//
// Throws Error{kInfeasibleBudget} when M > N.
QuotaTable AllocateQuotas(std::span<const std::uint64_t> bin_sizes, std::uint64_t budget);

}  // namespace adg

#endif  // ADG_QUOTA_H_
