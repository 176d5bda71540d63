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

#include "adg/quota.h"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "adg/error.h"

namespace adg {
namespace {

__extension__ using u128 = unsigned __int128;

// Hands out `units` one at a time to eligible bins ordered by remainder
// (descending), then bin index (ascending). Returns units left undistributed.
std::uint64_t DistributeByRemainder(std::vector<std::uint64_t>& quotas,
                                    std::span<const std::uint64_t> sizes,
                                    const std::vector<u128>& remainders, std::uint64_t units) {
  std::vector<std::size_t> order(quotas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  while (units > 0) {
    bool progressed = false;
    for (std::size_t b : order) {
      if (units == 0) break;
      if (quotas[b] >= sizes[b]) continue;
      ++quotas[b];
      --units;
      progressed = true;
    }
    if (!progressed) break;
  }
  return units;
}

}  // namespace

QuotaTable AllocateQuotas(std::span<const std::uint64_t> bin_sizes, std::uint64_t budget) {
  u128 total = 0;
  for (auto s : bin_sizes) total += s;
  if (budget > total) {
    throw Error(ErrorKind::kInfeasibleBudget,
                fmt::format("budget {} exceeds pool size {}", budget,
                            static_cast<std::uint64_t>(total)));
  }

  QuotaTable table;
  table.budget = budget;
  table.quotas.assign(bin_sizes.size(), 0);
  if (budget == 0) return table;

  std::vector<u128> remainders(bin_sizes.size(), 0);
  std::uint64_t assigned = 0;
  for (std::size_t b = 0; b < bin_sizes.size(); ++b) {
    const u128 scaled = static_cast<u128>(budget) * bin_sizes[b];
    table.quotas[b] = static_cast<std::uint64_t>(scaled / total);
    remainders[b] = scaled % total;
    assigned += table.quotas[b];
  }

  // Cap pass: floors never exceed sizes when M <= N, but keep the repair
  // so the contract holds independently of that argument.
  std::uint64_t freed = 0;
  for (std::size_t b = 0; b < bin_sizes.size(); ++b) {
    if (table.quotas[b] > bin_sizes[b]) {
      freed += table.quotas[b] - bin_sizes[b];
      table.quotas[b] = bin_sizes[b];
    }
  }
  const std::uint64_t left =
      DistributeByRemainder(table.quotas, bin_sizes, remainders, budget - assigned + freed);
  if (left != 0) {
    throw Error(ErrorKind::kInfeasibleBudget,
                fmt::format("could not place {} quota units within bin sizes", left));
  }
  return table;
}

}  // namespace adg
