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

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "adg/error.h"

namespace adg {
namespace {

bool RanksBefore(const DivergenceRecord& a, const DivergenceRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

}  // namespace

std::uint64_t SegmentStart(Segment segment, std::uint64_t size, std::uint64_t count) {
  if (count == 0 || count > size) return 1;
  switch (segment) {
    case Segment::kTop:
      return 1;
    case Segment::kTail:
      return size - count + 1;
    case Segment::kMiddle: {
      const std::uint64_t centre = (size + 1) / 2;
      std::uint64_t first = centre > count / 2 ? centre - count / 2 : 1;
      if (first < 1) first = 1;
      if (first + count - 1 > size) first = size - count + 1;
      return first;
    }
  }
  return 1;
}

SelectionManifest BinwiseSelect(std::span<const DivergenceRecord> records,
                                std::span<const std::uint32_t> bin_of, const QuotaTable& quotas,
                                const SelectOptions& options) {
  const std::size_t n = bin_of.size();
  const std::size_t bins = quotas.quotas.size();
  if (records.size() != n) {
    throw Error(ErrorKind::kConsistency,
                fmt::format("{} score records but {} bin assignments", records.size(), n));
  }
  // Records indexed by id; every id in [0, n) must appear exactly once.
  std::vector<const DivergenceRecord*> by_id(n, nullptr);
  for (const auto& r : records) {
    if (r.id >= n || by_id[r.id] != nullptr) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("score record id {} is out of range or duplicated", r.id), r.id);
    }
    by_id[r.id] = &r;
  }

  std::vector<std::vector<std::uint64_t>> members(bins);
  for (std::size_t id = 0; id < n; ++id) {
    if (bin_of[id] >= bins) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("instruction {} assigned to bin {} but only {} bins have quotas",
                              id, bin_of[id], bins),
                  id);
    }
    members[bin_of[id]].push_back(id);
  }
  std::uint64_t quota_sum = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (quotas.quotas[b] > members[b].size()) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("bin {} quota {} exceeds its size {}", b, quotas.quotas[b],
                              members[b].size()));
    }
    quota_sum += quotas.quotas[b];
  }
  if (quota_sum != quotas.budget) {
    throw Error(ErrorKind::kConsistency, "quotas do not sum to the budget");
  }

  SelectionManifest manifest;
  manifest.lines.resize(n);
  for (std::size_t id = 0; id < n; ++id) {
    manifest.lines[id].id = id;
    manifest.lines[id].bin = bin_of[id];
    manifest.lines[id].score = by_id[id]->score;
  }

  auto rank_order = [&](std::vector<std::uint64_t>& ids) {
    std::sort(ids.begin(), ids.end(), [&](std::uint64_t a, std::uint64_t b) {
      return RanksBefore(*by_id[a], *by_id[b]);
    });
  };

  for (std::size_t b = 0; b < bins; ++b) {
    auto& ids = members[b];
    rank_order(ids);
    const std::uint64_t size = ids.size();
    const std::uint64_t first = SegmentStart(options.segment, size, quotas.quotas[b]);
    for (std::uint64_t r = 0; r < size; ++r) {
      ManifestLine& line = manifest.lines[ids[r]];
      line.rank_in_bin = r + 1;
      if (!options.global_segment) {
        line.selected = quotas.quotas[b] > 0 && r + 1 >= first && r + 1 < first + quotas.quotas[b];
      }
    }
  }

  if (options.global_segment) {
    std::vector<std::uint64_t> all(n);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    rank_order(all);
    const std::uint64_t first = SegmentStart(options.segment, n, quotas.budget);
    for (std::uint64_t r = 0; r < quotas.budget; ++r) {
      manifest.lines[all[first - 1 + r]].selected = true;
    }
  }

  manifest.summary.budget = quotas.budget;
  manifest.summary.bins = static_cast<std::uint32_t>(bins);
  manifest.summary.segment = options.segment;
  manifest.summary.global_segment = options.global_segment;
  return manifest;
}

}  // namespace adg
