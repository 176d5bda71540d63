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

#ifndef ADG_SELECTION_H_
#define ADG_SELECTION_H_

#include <cstdint>
#include <span>

#include "adg/quota.h"
#include "adg/records.h"

namespace adg {

struct SelectOptions {
  Segment segment = Segment::kTop;
  // Apply the segment to the pool-wide score ranking instead of per bin.
  // Bins and quotas are still used for rank_in_bin bookkeeping only.
  bool global_segment = false;
};

// Rank band [first, first + count) (1-based) selected from a bin of `size`
// items for `segment`. Middle bands are centred on rank ceil(size / 2) and
// shifted left when they would run past the end.
std::uint64_t SegmentStart(Segment segment, std::uint64_t size, std::uint64_t count);

// Bin-wise selection. `bin_of[id]` is the bin of instruction `id`; records
// must cover exactly the ids [0, bin_of.size()). Within a bin, items are
// ranked by score descending with ties broken by ascending id.
//
// The returned manifest lines are in id order and its summary carries
// budget, bins and segment; callers fill in seed, lambda and prng.
SelectionManifest BinwiseSelect(std::span<const DivergenceRecord> records,
                                std::span<const std::uint32_t> bin_of, const QuotaTable& quotas,
                                const SelectOptions& options = {});

}  // namespace adg

#endif  // ADG_SELECTION_H_
