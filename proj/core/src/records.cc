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

#include "adg/records.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "adg/error.h"
#include "json.hpp"

namespace adg {
namespace {

using nlohmann::json;

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  return out;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  return in;
}

void CloseChecked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path.string()));
}

json ParseLine(std::string_view line, const std::filesystem::path& path, std::size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw Error(ErrorKind::kFormat, "not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat,
                fmt::format("{}:{}: malformed record: {}", path.string(), lineno, e.what()));
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat,
                fmt::format("{}:{}: malformed record: {}", path.string(), lineno, e.what()));
  }
}

template <typename T>
T Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::kFormat, fmt::format("missing field '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kFormat, fmt::format("field '{}' has the wrong type", key));
  }
}

std::uint64_t IdField(const json& j) {
  auto it = j.find("id");
  if (it == j.end() || !it->is_number_unsigned()) {
    throw Error(ErrorKind::kFormat, "field 'id' missing or not an unsigned integer");
  }
  return it->get<std::uint64_t>();
}

template <typename Range, typename IdOf>
void RequireStrictlyIncreasing(const Range& range, IdOf id_of) {
  for (std::size_t i = 1; i < range.size(); ++i) {
    if (id_of(range[i]) <= id_of(range[i - 1])) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("records not sorted by id at position {} (id {} after {})", i,
                              id_of(range[i]), id_of(range[i - 1])));
    }
  }
}

template <typename Fn>
void ForEachLine(const std::filesystem::path& path, Fn fn) {
  std::ifstream in = OpenForRead(path);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    fn(line, lineno);
  }
}

}  // namespace

std::string_view SegmentName(Segment segment) {
  switch (segment) {
    case Segment::kTop: return "top";
    case Segment::kMiddle: return "middle";
    case Segment::kTail: return "tail";
  }
  return "top";
}

std::optional<Segment> ParseSegment(std::string_view name) {
  if (name == "top") return Segment::kTop;
  if (name == "middle") return Segment::kMiddle;
  if (name == "tail") return Segment::kTail;
  return std::nullopt;
}

std::vector<std::uint64_t> SelectionManifest::SelectedIds() const {
  std::vector<std::uint64_t> ids;
  for (const auto& line : lines) {
    if (line.selected) ids.push_back(line.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string FormatReal(double value) {
  // "-0" would read back as the integer zero and lose its sign.
  if (value == 0.0 && std::signbit(value)) return "-0.0";
  return fmt::format("{:.17g}", value);
}

std::string EncodeRecord(const DivergenceRecord& r) {
  std::string out = fmt::format(R"({{"id":{},"dispersion":{},"anisotropy":{},"score":{},"lambda":{},"eigenvalues":[)",
                                r.id, FormatReal(r.dispersion), FormatReal(r.anisotropy),
                                FormatReal(r.score), FormatReal(r.lambda));
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatReal(r.eigenvalues[i]);
  }
  out += "]}";
  return out;
}

DivergenceRecord DecodeDivergenceRecord(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, fmt::format("malformed record: {}", e.what()));
  }
  if (!j.is_object()) throw Error(ErrorKind::kFormat, "record is not a JSON object");
  DivergenceRecord r;
  r.id = IdField(j);
  r.dispersion = Field<double>(j, "dispersion");
  r.anisotropy = Field<double>(j, "anisotropy");
  r.score = Field<double>(j, "score");
  r.lambda = Field<double>(j, "lambda");
  r.eigenvalues = Field<std::vector<double>>(j, "eigenvalues");
  return r;
}

void WriteDivergenceRecords(const std::filesystem::path& path,
                            std::span<const DivergenceRecord> records) {
  RequireStrictlyIncreasing(records, [](const DivergenceRecord& r) { return r.id; });
  std::ofstream out = OpenForWrite(path);
  for (const auto& r : records) out << EncodeRecord(r) << '\n';
  CloseChecked(out, path);
}

std::vector<DivergenceRecord> ReadDivergenceRecords(const std::filesystem::path& path) {
  std::vector<DivergenceRecord> records;
  ForEachLine(path, [&](const std::string& line, std::size_t lineno) {
    try {
      records.push_back(DecodeDivergenceRecord(line));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  });
  return records;
}

void WriteManifest(const std::filesystem::path& path, const SelectionManifest& manifest) {
  RequireStrictlyIncreasing(manifest.lines, [](const ManifestLine& l) { return l.id; });
  std::ofstream out = OpenForWrite(path);
  for (const auto& l : manifest.lines) {
    out << fmt::format(R"({{"id":{},"bin":{},"score":{},"rank_in_bin":{},"selected":{}}})", l.id,
                       l.bin, FormatReal(l.score), l.rank_in_bin, l.selected)
        << '\n';
  }
  const auto& s = manifest.summary;
  out << fmt::format(
             R"({{"summary":{{"budget":{},"bins":{},"seed":{},"lambda":{},"segment":"{}","global_segment":{},"prng":"{}"}}}})",
             s.budget, s.bins, s.seed, FormatReal(s.lambda), SegmentName(s.segment),
             s.global_segment, s.prng)
      << '\n';
  CloseChecked(out, path);
}

SelectionManifest ReadManifest(const std::filesystem::path& path) {
  SelectionManifest manifest;
  bool have_summary = false;
  ForEachLine(path, [&](const std::string& line, std::size_t lineno) {
    json j = ParseLine(line, path, lineno);
    try {
      if (auto it = j.find("summary"); it != j.end()) {
        const json& s = *it;
        manifest.summary.budget = Field<std::uint64_t>(s, "budget");
        manifest.summary.bins = Field<std::uint32_t>(s, "bins");
        manifest.summary.seed = Field<std::uint64_t>(s, "seed");
        manifest.summary.lambda = Field<double>(s, "lambda");
        auto segment = ParseSegment(Field<std::string>(s, "segment"));
        if (!segment) throw Error(ErrorKind::kFormat, "unknown segment");
        manifest.summary.segment = *segment;
        manifest.summary.global_segment = Field<bool>(s, "global_segment");
        manifest.summary.prng = Field<std::string>(s, "prng");
        have_summary = true;
        return;
      }
      ManifestLine l;
      l.id = IdField(j);
      l.bin = Field<std::uint32_t>(j, "bin");
      l.score = Field<double>(j, "score");
      l.rank_in_bin = Field<std::uint64_t>(j, "rank_in_bin");
      l.selected = Field<bool>(j, "selected");
      manifest.lines.push_back(l);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  });
  if (!have_summary) {
    throw Error(ErrorKind::kFormat, fmt::format("{}: manifest has no summary line", path.string()));
  }
  return manifest;
}

void WriteSelectedIds(const std::filesystem::path& path, std::span<const std::uint64_t> ids) {
  RequireStrictlyIncreasing(ids, [](std::uint64_t id) { return id; });
  std::ofstream out = OpenForWrite(path);
  for (auto id : ids) out << id << '\n';
  CloseChecked(out, path);
}

std::vector<std::uint64_t> ReadSelectedIds(const std::filesystem::path& path) {
  std::vector<std::uint64_t> ids;
  ForEachLine(path, [&](const std::string& line, std::size_t lineno) {
    std::size_t consumed = 0;
    std::uint64_t id = 0;
    try {
      id = std::stoull(line, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != line.size() || line.front() == '-') {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: not an id", path.string(), lineno));
    }
    ids.push_back(id);
  });
  return ids;
}

void WriteInstructions(const std::filesystem::path& path,
                       std::span<const InstructionRecord> records) {
  RequireStrictlyIncreasing(records, [](const InstructionRecord& r) { return r.id; });
  std::ofstream out = OpenForWrite(path);
  for (const auto& r : records) {
    if (r.text.empty()) {
      throw Error(ErrorKind::kData, fmt::format("instruction {} has empty text", r.id), r.id);
    }
    json j;
    j["id"] = r.id;
    j["text"] = r.text;
    if (!r.metadata.empty()) j["metadata"] = r.metadata;
    out << j.dump() << '\n';
  }
  CloseChecked(out, path);
}

std::vector<InstructionRecord> ReadInstructions(const std::filesystem::path& path) {
  std::vector<InstructionRecord> records;
  ForEachLine(path, [&](const std::string& line, std::size_t lineno) {
    json j = ParseLine(line, path, lineno);
    try {
      InstructionRecord r;
      r.id = IdField(j);
      r.text = Field<std::string>(j, "text");
      if (r.text.empty()) throw Error(ErrorKind::kData, "empty instruction text");
      if (auto it = j.find("metadata"); it != j.end()) {
        r.metadata = it->get<std::map<std::string, std::string>>();
      }
      records.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kFormat, fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  });
  std::sort(records.begin(), records.end(),
            [](const InstructionRecord& a, const InstructionRecord& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id != i) {
      throw Error(ErrorKind::kConsistency,
                  fmt::format("{}: instruction ids must be unique and dense in [0, {}); "
                              "found id {} at position {}",
                              path.string(), records.size(), records[i].id, i));
    }
  }
  return records;
}

}  // namespace adg
