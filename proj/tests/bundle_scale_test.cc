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

// Writes a 52,002 x 5 x 4096 answers bundle and spot-checks random access
// against the generator. Needs ~4.3 GB of scratch space.

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <vector>

#include "adg/bundle.h"
#include "adg/prng.h"
#include "oracle.h"

namespace adg {
namespace {

constexpr std::uint64_t kItems = 52002;
constexpr std::uint32_t kK = 5;
constexpr std::uint32_t kDim = 4096;

void Generate(std::uint64_t item, std::span<float> out) {
  auto rng = SplitMix64::ForStream(99, item);
  for (auto& v : out) v = static_cast<float>(rng.NextUniform() * 2.0 - 1.0);
}

TEST(BundleScale, FullPoolBundleRandomAccess) {
  testing::TempDir dir;
  const auto path = dir / "big.adge";
  const std::uint64_t bytes_needed = kItems * kK * kDim * 4ull;
  const auto space = std::filesystem::space(dir.path());
  if (space.available < bytes_needed + (1ull << 28)) {
    GTEST_SKIP() << "not enough scratch space for a " << bytes_needed << " byte bundle";
  }

  BundleHeader h;
  h.kind = BundleKind::kAnswers;
  h.item_count = kItems;
  h.vectors_per_item = kK;
  h.dim = kDim;
  std::vector<float> item(kK * kDim);
  {
    BundleWriter w(path, h);
    for (std::uint64_t i = 0; i < kItems; ++i) {
      Generate(i, item);
      w.Append(item);
    }
    w.Finish();
  }

  auto r = BundleReader::Open(path);
  EXPECT_EQ(r.item_count(), kItems);
  EXPECT_EQ(r.vectors_per_item(), kK);
  EXPECT_EQ(r.dim(), kDim);

  SplitMix64 pick(5);
  std::vector<std::uint64_t> probes = {0, 1, kItems / 2, kItems - 2, kItems - 1};
  for (int i = 0; i < 200; ++i) probes.push_back(pick.NextBelow(kItems));
  std::vector<float> expected(kK * kDim), got(kK * kDim);
  for (auto i : probes) {
    Generate(i, expected);
    r.Read(i, got);
    ASSERT_TRUE(std::equal(expected.begin(), expected.end(), got.begin())) << "item " << i;
  }
}

}  // namespace
}  // namespace adg
