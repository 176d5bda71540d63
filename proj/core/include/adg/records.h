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

#ifndef ADG_RECORDS_H_
#define ADG_RECORDS_H_

// JSON-lines record files (UTF-8, LF endings, one object per line).
// Reals are written with 17 significant digits so a read-back reproduces
// every double exactly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adg {

// Per-instruction divergence scores. `lambda` is the fusion weight the
// score was computed with.
struct DivergenceRecord {
  std::uint64_t id = 0;
  double dispersion = 0.0;
  double anisotropy = 0.0;
  double score = 0.0;
  double lambda = 0.0;
  std::vector<double> eigenvalues;

  bool operator==(const DivergenceRecord&) const = default;
};

// Which band of the within-bin score ranking is selected.
enum class Segment { kTop, kMiddle, kTail };

std::string_view SegmentName(Segment segment);
std::optional<Segment> ParseSegment(std::string_view name);

struct ManifestLine {
  std::uint64_t id = 0;
  std::uint32_t bin = 0;
  double score = 0.0;
  std::uint64_t rank_in_bin = 0;  // 1-based
  bool selected = false;

  bool operator==(const ManifestLine&) const = default;
};

struct ManifestSummary {
  std::uint64_t budget = 0;
  std::uint32_t bins = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  Segment segment = Segment::kTop;
  bool global_segment = false;
  std::string prng;

  bool operator==(const ManifestSummary&) const = default;
};

struct SelectionManifest {
  std::vector<ManifestLine> lines;
  ManifestSummary summary;

  // Ascending ids of selected lines.
  std::vector<std::uint64_t> SelectedIds() const;

  bool operator==(const SelectionManifest&) const = default;
};

struct InstructionRecord {
  std::uint64_t id = 0;
  std::string text;
  std::map<std::string, std::string> metadata;

  bool operator==(const InstructionRecord&) const = default;
};

// Formats a double with 17 significant digits ("%.17g").
std::string FormatReal(double value);

std::string EncodeRecord(const DivergenceRecord& record);
DivergenceRecord DecodeDivergenceRecord(std::string_view line);

// Records must be strictly increasing by id; otherwise Error{kConsistency}.
void WriteDivergenceRecords(const std::filesystem::path& path,
                            std::span<const DivergenceRecord> records);
std::vector<DivergenceRecord> ReadDivergenceRecords(const std::filesystem::path& path);

// Lines (sorted by id) followed by one {"summary": {...}} footer line.
void WriteManifest(const std::filesystem::path& path, const SelectionManifest& manifest);
SelectionManifest ReadManifest(const std::filesystem::path& path);

// Plain text, one id per line, ascending.
void WriteSelectedIds(const std::filesystem::path& path, std::span<const std::uint64_t> ids);
std::vector<std::uint64_t> ReadSelectedIds(const std::filesystem::path& path);

// Instruction manifests: ids must be unique, dense in [0, N) and texts
// non-empty. Order in the file is free; the result is sorted by id.
void WriteInstructions(const std::filesystem::path& path,
                       std::span<const InstructionRecord> records);
std::vector<InstructionRecord> ReadInstructions(const std::filesystem::path& path);

}  // namespace adg

#endif  // ADG_RECORDS_H_
