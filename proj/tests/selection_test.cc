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

#include "adg/selection.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "adg/error.h"
#include "adg/quota.h"
#include "oracle.h"

namespace adg {
namespace {

std::vector<DivergenceRecord> Records(const std::vector<double>& scores) {
  std::vector<DivergenceRecord> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({i, 0, 0, scores[i], 0.4, {}});
  return out;
}

QuotaTable Quotas(std::vector<std::uint64_t> q) {
  QuotaTable t;
  t.quotas = std::move(q);
  for (auto x : t.quotas) t.budget += x;
  return t;
}

TEST(Select, TopOfOneBin) {
  const auto r = Records({0.9, 0.5, 0.1});
  const std::vector<std::uint32_t> bins = {0, 0, 0};
  const auto m = BinwiseSelect(r, bins, Quotas({2}));
  EXPECT_EQ(m.SelectedIds(), (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(m.lines[0].rank_in_bin, 1u);
  EXPECT_EQ(m.lines[2].rank_in_bin, 3u);
}

TEST(Select, TailOfOneBin) {
  const auto r = Records({0.9, 0.5, 0.1});
  const std::vector<std::uint32_t> bins = {0, 0, 0};
  const auto m = BinwiseSelect(r, bins, Quotas({2}), {Segment::kTail, false});
  EXPECT_EQ(m.SelectedIds(), (std::vector<std::uint64_t>{1, 2}));
}

TEST(Select, TwoBinsWithSevenAndThree) {
  const std::vector<double> scores = {0.1, 0.8, 0.3, 0.9, 0.2, 0.5, 0.7, 0.4, 0.6, 0.05};
  const std::vector<std::uint32_t> bins = {0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  const std::vector<std::uint64_t> sizes = {7, 3};
  const auto q = AllocateQuotas(sizes, 4);
  ASSERT_EQ(q.quotas, (std::vector<std::uint64_t>{3, 1}));
  const auto m = BinwiseSelect(Records(scores), bins, q);
  // Top three of bin 0 are ids 3, 1, 6; top of bin 1 is id 8.
  EXPECT_EQ(m.SelectedIds(), (std::vector<std::uint64_t>{1, 3, 6, 8}));
  EXPECT_EQ(m.summary.budget, 4u);
  EXPECT_EQ(m.summary.bins, 2u);
}

TEST(Select, TiesBreakByLowerId) {
  const auto r = Records({0.5, 0.5, 0.5, 0.5});
  const std::vector<std::uint32_t> bins = {0, 0, 0, 0};
  EXPECT_EQ(BinwiseSelect(r, bins, Quotas({2})).SelectedIds(), (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(BinwiseSelect(r, bins, Quotas({2}), {Segment::kTail, false}).SelectedIds(),
            (std::vector<std::uint64_t>{2, 3}));
}

TEST(Select, MiddleSegmentWindow) {
  EXPECT_EQ(SegmentStart(Segment::kMiddle, 9, 3), 4u);   // ranks 4..6 around 5
  EXPECT_EQ(SegmentStart(Segment::kMiddle, 10, 2), 4u);  // ranks 4..5
  EXPECT_EQ(SegmentStart(Segment::kMiddle, 5, 5), 1u);
  EXPECT_EQ(SegmentStart(Segment::kMiddle, 4, 3), 1u);
  EXPECT_EQ(SegmentStart(Segment::kMiddle, 1, 1), 1u);
  EXPECT_EQ(SegmentStart(Segment::kTail, 9, 3), 7u);
  EXPECT_EQ(SegmentStart(Segment::kTop, 9, 3), 1u);
  const auto r = Records({0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1});
  const std::vector<std::uint32_t> bins(9, 0);
  EXPECT_EQ(BinwiseSelect(r, bins, Quotas({3}), {Segment::kMiddle, false}).SelectedIds(),
            (std::vector<std::uint64_t>{3, 4, 5}));
}

TEST(Select, GlobalSegmentRanksWholePool) {
  const auto r = Records({0.9, 0.8, 0.1, 0.2});
  const std::vector<std::uint32_t> bins = {0, 0, 1, 1};
  const auto m = BinwiseSelect(r, bins, Quotas({1, 1}), {Segment::kTop, true});
  EXPECT_EQ(m.SelectedIds(), (std::vector<std::uint64_t>{0, 1}));
}

TEST(Select, InconsistentInputsRejected) {
  const auto r = Records({0.9, 0.5, 0.1});
  const std::vector<std::uint32_t> bins = {0, 0, 1};
  EXPECT_THROW(BinwiseSelect(r, std::vector<std::uint32_t>{0, 0}, Quotas({1})), Error);
  EXPECT_THROW(BinwiseSelect(r, bins, Quotas({1})), Error);      // bin 1 has no quota
  EXPECT_THROW(BinwiseSelect(r, bins, Quotas({1, 2})), Error);   // quota above bin size
  auto dup = r;
  dup[2].id = 1;
  EXPECT_THROW(BinwiseSelect(dup, bins, Quotas({1, 1})), Error);
  QuotaTable wrong = Quotas({1, 1});
  wrong.budget = 3;
  EXPECT_THROW(BinwiseSelect(r, bins, wrong), Error);
}

// Random pools for the manifest properties.
struct Pool {
  std::vector<DivergenceRecord> records;
  std::vector<std::uint32_t> bins;
  QuotaTable quotas;
};

Pool RandomPool(std::mt19937_64& rng) {
  Pool p;
  const std::size_t n = 1 + rng() % 400;
  const std::uint32_t b = 1 + static_cast<std::uint32_t>(rng() % std::min<std::size_t>(n, 40));
  std::vector<std::uint64_t> sizes(b, 0);
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse scores so ties happen.
    p.records.push_back({i, 0, 0, double(rng() % 20) / 20.0, 0.4, {}});
    p.bins.push_back(static_cast<std::uint32_t>(rng() % b));
    ++sizes[p.bins.back()];
  }
  p.quotas = AllocateQuotas(sizes, rng() % (n + 1));
  return p;
}

TEST(SelectProperty, ManifestInvariants) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 500; ++t) {
    const auto p = RandomPool(rng);
    const auto segment = static_cast<Segment>(t % 3);
    const auto m = BinwiseSelect(p.records, p.bins, p.quotas, {segment, false});
    ASSERT_EQ(m.lines.size(), p.records.size());
    const auto ids = m.SelectedIds();
    ASSERT_EQ(ids.size(), p.quotas.budget);
    ASSERT_EQ(std::set<std::uint64_t>(ids.begin(), ids.end()).size(), ids.size());

    std::vector<std::uint64_t> per_bin(p.quotas.quotas.size(), 0);
    for (const auto& l : m.lines) per_bin[l.bin] += l.selected;
    for (std::size_t b = 0; b < per_bin.size(); ++b) {
      ASSERT_EQ(per_bin[b], p.quotas.quotas[b]);
      // Non-empty bins with a positive quota contribute.
      if (p.quotas.quotas[b] >= 1) ASSERT_GE(per_bin[b], 1u);
    }
    if (segment == Segment::kTop) {
      for (const auto& sel : m.lines) {
        if (!sel.selected) continue;
        for (const auto& other : m.lines) {
          if (other.bin != sel.bin || other.selected) continue;
          ASSERT_TRUE(other.score < sel.score || (other.score == sel.score && other.id > sel.id));
        }
      }
    }
    // Same inputs, same manifest.
    ASSERT_EQ(m, BinwiseSelect(p.records, p.bins, p.quotas, {segment, false}));
  }
}

TEST(SelectProperty, RanksFormPermutationPerBin) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const auto p = RandomPool(rng);
    const auto m = BinwiseSelect(p.records, p.bins, p.quotas);
    std::vector<std::set<std::uint64_t>> ranks(p.quotas.quotas.size());
    std::vector<std::uint64_t> sizes(p.quotas.quotas.size(), 0);
    for (const auto& l : m.lines) {
      ranks[l.bin].insert(l.rank_in_bin);
      ++sizes[l.bin];
    }
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      ASSERT_EQ(ranks[b].size(), sizes[b]);
      if (sizes[b] > 0) ASSERT_EQ(*ranks[b].rbegin(), sizes[b]);
    }
  }
}

}  // namespace
}  // namespace adg
