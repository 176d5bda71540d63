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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "adg/error.h"
#include "oracle.h"

namespace adg {
namespace {

std::vector<std::uint64_t> Q(std::vector<std::uint64_t> sizes, std::uint64_t m) {
  return AllocateQuotas(sizes, m).quotas;
}

using V = std::vector<std::uint64_t>;

TEST(Quota, WorkedExamples) {
  EXPECT_EQ(Q({7, 3}, 4), (V{3, 1}));
  EXPECT_EQ(Q({5, 5}, 3), (V{2, 1}));
  EXPECT_EQ(Q({1, 9}, 5), (V{1, 4}));
  EXPECT_EQ(Q({4}, 4), (V{4}));
  EXPECT_EQ(Q({3, 3, 3}, 0), (V{0, 0, 0}));
  EXPECT_EQ(Q({0, 4, 0}, 2), (V{0, 2, 0}));
}

TEST(Quota, InfeasibleBudget) {
  try {
    Q({2, 3}, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasibleBudget);
  }
}

TEST(Quota, LargeCountsDoNotOverflow) {
  const std::uint64_t big = 1ull << 62;
  const auto q = Q({big, big - 1, 1}, big);
  EXPECT_EQ(q[0] + q[1] + q[2], big);
  EXPECT_LE(q[2], 1u);
}

// Random pools for the properties below.
struct Case {
  V sizes;
  std::uint64_t budget;
};

Case RandomCase(std::mt19937_64& rng) {
  const std::size_t bins = 1 + rng() % 2000;
  const std::uint64_t n_target = bins + rng() % 100000;
  V sizes(bins, 0);
  // Skewed sizes: a few large bins, many small ones, some empty.
  for (std::uint64_t i = bins; i < n_target && i < 100000; ++i) {
    const double u = std::ldexp(double(rng() >> 11), -53);
    sizes[static_cast<std::size_t>(u * u * bins)] += 1;
  }
  for (auto& s : sizes) s += rng() % 4 == 0 ? 0 : 1;
  std::uint64_t n = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
  if (n == 0) sizes[0] = n = 1;
  return {sizes, rng() % (n + 1)};
}

TEST(QuotaProperty, ExactSumAndCaps) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const auto c = RandomCase(rng);
    const auto q = AllocateQuotas(c.sizes, c.budget);
    ASSERT_EQ(q.budget, c.budget);
    ASSERT_EQ(std::accumulate(q.quotas.begin(), q.quotas.end(), std::uint64_t{0}), c.budget);
    for (std::size_t b = 0; b < c.sizes.size(); ++b) ASSERT_LE(q.quotas[b], c.sizes[b]);
  }
}

TEST(QuotaProperty, MatchesUnitByUnitReference) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 3000; ++t) {
    const std::size_t bins = 1 + rng() % 12;
    V sizes(bins);
    for (auto& s : sizes) s = rng() % 15;
    const std::uint64_t n = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
    if (n == 0) continue;
    const std::uint64_t m = rng() % (n + 1);
    ASSERT_EQ(Q(sizes, m), testing::ReferenceQuotas(sizes, m));
  }
}

TEST(QuotaProperty, WithinOneOfExactShare) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 1000; ++t) {
    const auto c = RandomCase(rng);
    const std::uint64_t n = std::accumulate(c.sizes.begin(), c.sizes.end(), std::uint64_t{0});
    const auto q = Q(c.sizes, c.budget);
    for (std::size_t b = 0; b < q.size(); ++b) {
      const long double share = static_cast<long double>(c.budget) * c.sizes[b] / n;
      ASSERT_LT(std::abs(static_cast<long double>(q[b]) - share), 1.0L);
    }
  }
}

// When independent rounding happens to hit the budget and has no half-way
// ties, it is the same allocation.
TEST(QuotaProperty, AgreesWithRoundingWhenRoundingIsFeasible) {
  std::mt19937_64 rng(4);
  int compared = 0;
  for (int t = 0; t < 5000; ++t) {
    const std::size_t bins = 1 + rng() % 8;
    V sizes(bins);
    for (auto& s : sizes) s = 1 + rng() % 40;
    const std::uint64_t n = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
    const std::uint64_t m = rng() % (n + 1);
    V rounded(bins);
    bool tie = false;
    std::uint64_t sum = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      tie |= (2 * m * sizes[b]) % (2 * n) == n;
      rounded[b] = (2 * m * sizes[b] + n) / (2 * n);
      sum += rounded[b];
    }
    if (tie || sum != m) continue;
    ++compared;
    ASSERT_EQ(Q(sizes, m), rounded);
  }
  EXPECT_GT(compared, 1000);
}

// A strictly larger bin never receives fewer units. Equal-size bins can
// differ by one because leftover units go to the lower index.
TEST(QuotaProperty, LargerBinsNeverGetLess) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    const auto c = RandomCase(rng);
    const auto q = Q(c.sizes, c.budget);
    std::vector<std::size_t> order(q.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.sizes[a] < c.sizes[b]; });
    std::uint64_t max_smaller = 0, max_group = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto b = order[i];
      if (i > 0 && c.sizes[b] != c.sizes[order[i - 1]]) max_smaller = std::max(max_smaller, max_group);
      if (i == 0 || c.sizes[b] != c.sizes[order[i - 1]]) max_group = 0;
      ASSERT_GE(q[b], max_smaller);
      max_group = std::max(max_group, q[b]);
      if (i > 0 && c.sizes[b] == c.sizes[order[i - 1]]) {
        const auto a = order[i - 1];
        ASSERT_LE(q[a] > q[b] ? q[a] - q[b] : q[b] - q[a], 1u);
      }
    }
  }
}

}  // namespace
}  // namespace adg
