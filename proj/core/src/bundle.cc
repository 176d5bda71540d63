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

#include "adg/bundle.h"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "adg/error.h"
#include "json.hpp"

namespace adg {

static_assert(std::endian::native == std::endian::little,
              "ADGE payloads are read and written in host byte order");

namespace {

using nlohmann::json;

constexpr std::size_t kPrefixBytes = 16;  // magic + version + header length
constexpr std::size_t kPayloadAlignment = 8;

std::string EncodeHeaderJson(const BundleHeader& header) {
  json j;
  j["kind"] = std::string(BundleKindName(header.kind));
  j["item_count"] = header.item_count;
  j["vectors_per_item"] = header.vectors_per_item;
  j["dim"] = header.dim;
  j["dtype"] = "f32le";
  j["id_table_present"] = header.id_table_present;
  if (!header.metadata.empty()) j["metadata"] = header.metadata;
  std::string text = j.dump();
  const std::size_t end = kPrefixBytes + text.size();
  const std::size_t padded =
      (end + kPayloadAlignment - 1) / kPayloadAlignment * kPayloadAlignment;
  text.append(padded - end, ' ');
  return text;
}

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  out.append(bytes.data(), bytes.size());
}

std::string EncodePrefix(const BundleHeader& header) {
  const std::string body = EncodeHeaderJson(header);
  std::string out(kBundleMagic, sizeof(kBundleMagic));
  AppendLittleEndian<std::uint32_t>(out, kBundleVersion);
  AppendLittleEndian<std::uint64_t>(out, body.size());
  out += body;
  return out;
}

void CheckFinite(std::span<const float> values, const BundleHeader& header,
                 std::uint64_t first_item) {
  const std::uint64_t per_item = header.floats_per_item();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const std::uint64_t item = first_item + i / per_item;
      const std::uint64_t within = i % per_item;
      throw Error(ErrorKind::kData,
                  fmt::format("non-finite value at item {}, vector {}, dim {}",
                              item, within / header.dim, within % header.dim),
                  item);
    }
  }
}

void CheckPayloadFits(const BundleHeader& header) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t per_item_bytes = header.floats_per_item() * sizeof(float);
  if (header.item_count > kMax / per_item_bytes) {
    throw Error(ErrorKind::kLength, "declared payload length overflows 64 bits");
  }
}

std::string ExpectString(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorKind::kFormat,
                fmt::format("bundle header: '{}' missing or not a string", key));
  }
  return it->get<std::string>();
}

std::uint64_t ExpectUnsigned(const json& j, const char* key, std::uint64_t max) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw Error(ErrorKind::kFormat,
                fmt::format("bundle header: '{}' missing or not an unsigned integer", key));
  }
  const auto value = it->get<std::uint64_t>();
  if (value > max) {
    throw Error(ErrorKind::kFormat,
                fmt::format("bundle header: '{}' = {} out of range", key, value));
  }
  return value;
}

BundleHeader DecodeHeaderJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, fmt::format("bundle header is not JSON: {}", e.what()));
  }
  if (!j.is_object()) throw Error(ErrorKind::kFormat, "bundle header is not a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "item_count" && key != "vectors_per_item" &&
        key != "dim" && key != "dtype" && key != "id_table_present" && key != "metadata") {
      throw Error(ErrorKind::kFormat, fmt::format("bundle header: unknown key '{}'", key));
    }
  }

  BundleHeader header;
  const std::string kind = ExpectString(j, "kind");
  if (kind == "answers") {
    header.kind = BundleKind::kAnswers;
  } else if (kind == "semantic") {
    header.kind = BundleKind::kSemantic;
  } else {
    throw Error(ErrorKind::kFormat, fmt::format("bundle header: unknown kind '{}'", kind));
  }
  const std::string dtype = ExpectString(j, "dtype");
  if (dtype != "f32le") {
    throw Error(ErrorKind::kFormat, fmt::format("bundle header: unsupported dtype '{}'", dtype));
  }
  constexpr auto kU32 = std::numeric_limits<std::uint32_t>::max();
  header.item_count = ExpectUnsigned(j, "item_count", std::numeric_limits<std::uint64_t>::max());
  header.vectors_per_item = static_cast<std::uint32_t>(ExpectUnsigned(j, "vectors_per_item", kU32));
  header.dim = static_cast<std::uint32_t>(ExpectUnsigned(j, "dim", kU32));

  auto table = j.find("id_table_present");
  if (table == j.end() || !table->is_boolean()) {
    throw Error(ErrorKind::kFormat, "bundle header: 'id_table_present' missing or not a boolean");
  }
  header.id_table_present = table->get<bool>();

  if (auto meta = j.find("metadata"); meta != j.end()) {
    if (!meta->is_object()) throw Error(ErrorKind::kFormat, "bundle header: 'metadata' is not an object");
    for (const auto& [key, value] : meta->items()) {
      if (!value.is_string()) {
        throw Error(ErrorKind::kFormat,
                    fmt::format("bundle header: metadata '{}' is not a string", key));
      }
      header.metadata.emplace(key, value.get<std::string>());
    }
  }
  return header;
}

std::vector<std::string> ReadIdTable(const std::filesystem::path& path,
                                     std::uint64_t expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open id table {}", path.string()));
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) ids.push_back(std::move(line));
  if (ids.size() != expected) {
    throw Error(ErrorKind::kLength,
                fmt::format("id table {} has {} entries, bundle has {} items",
                            path.string(), ids.size(), expected));
  }
  return ids;
}

void WriteIdTable(const std::filesystem::path& path, std::span<const std::string> ids) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  for (const auto& id : ids) {
    if (id.find('\n') != std::string::npos) {
      throw Error(ErrorKind::kData, "id table entries may not contain newlines");
    }
    out << id << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path.string()));
}

}  // namespace

std::string_view BundleKindName(BundleKind kind) {
  return kind == BundleKind::kAnswers ? "answers" : "semantic";
}

std::filesystem::path IdTablePath(const std::filesystem::path& bundle) {
  std::filesystem::path p = bundle;
  p += ".ids";
  return p;
}

void BundleHeader::Validate() const {
  if (item_count < 1) throw Error(ErrorKind::kFormat, "bundle item_count must be >= 1");
  if (vectors_per_item < 1) throw Error(ErrorKind::kFormat, "bundle vectors_per_item must be >= 1");
  if (dim < 1) throw Error(ErrorKind::kFormat, "bundle dim must be >= 1");
  if (kind == BundleKind::kAnswers && vectors_per_item < 2) {
    throw Error(ErrorKind::kDomain,
                fmt::format("answers bundle needs K >= 2 vectors per item, got {}",
                            vectors_per_item));
  }
  CheckPayloadFits(*this);
}

void WriteBundle(const std::filesystem::path& path, const BundleHeader& header,
                 std::span<const float> vectors, std::span<const std::string> id_table) {
  header.Validate();
  if (vectors.size() * sizeof(float) != header.payload_bytes()) {
    throw Error(ErrorKind::kLength,
                fmt::format("payload has {} floats, header declares {}", vectors.size(),
                            header.item_count * header.floats_per_item()));
  }
  if (header.id_table_present != !id_table.empty()) {
    throw Error(ErrorKind::kConsistency, "id_table_present disagrees with the supplied id table");
  }
  if (!id_table.empty() && id_table.size() != header.item_count) {
    throw Error(ErrorKind::kLength, "id table size differs from item_count");
  }
  CheckFinite(vectors, header, 0);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
  const std::string prefix = EncodePrefix(header);
  out.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));
  out.write(reinterpret_cast<const char*>(vectors.data()),
            static_cast<std::streamsize>(vectors.size_bytes()));
  out.close();
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path.string()));
  if (!id_table.empty()) WriteIdTable(IdTablePath(path), id_table);
}

// --- MemoryItemSource ----------------------------------------------------

MemoryItemSource::MemoryItemSource(std::vector<float> values, std::uint64_t items,
                                   std::uint32_t vectors_per_item, std::uint32_t dim)
    : values_(std::move(values)), items_(items), vectors_per_item_(vectors_per_item), dim_(dim) {
  if (values_.size() != items_ * vectors_per_item_ * dim_) {
    throw Error(ErrorKind::kLength,
                fmt::format("buffer holds {} floats, expected {} x {} x {}", values_.size(),
                            items_, vectors_per_item_, dim_));
  }
}

void MemoryItemSource::Read(std::uint64_t index, std::span<float> out) const {
  const std::uint64_t per_item = static_cast<std::uint64_t>(vectors_per_item_) * dim_;
  if (index >= items_ || out.size() != per_item) {
    throw Error(ErrorKind::kDomain, fmt::format("bad read of item {}", index));
  }
  std::memcpy(out.data(), values_.data() + index * per_item, per_item * sizeof(float));
}

// --- BundleWriter ---------------------------------------------------------

BundleWriter::BundleWriter(const std::filesystem::path& path, BundleHeader header)
    : path_(path), header_(std::move(header)) {
  header_.Validate();
  if (header_.id_table_present) {
    throw Error(ErrorKind::kConfig, "BundleWriter does not write id tables; use WriteBundle");
  }
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path_.string()));
  const std::string prefix = EncodePrefix(header_);
  out_.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));
}

BundleWriter::~BundleWriter() = default;

void BundleWriter::Append(std::span<const float> item) {
  if (finished_) throw Error(ErrorKind::kConsistency, "BundleWriter already finished");
  if (item.size() != header_.floats_per_item()) {
    throw Error(ErrorKind::kLength,
                fmt::format("item has {} floats, expected {}", item.size(),
                            header_.floats_per_item()));
  }
  if (written_ >= header_.item_count) {
    throw Error(ErrorKind::kLength, "more items appended than item_count declares");
  }
  CheckFinite(item, header_, written_);
  out_.write(reinterpret_cast<const char*>(item.data()),
             static_cast<std::streamsize>(item.size_bytes()));
  ++written_;
}

void BundleWriter::Finish() {
  if (finished_) return;
  if (written_ != header_.item_count) {
    throw Error(ErrorKind::kLength,
                fmt::format("wrote {} items, header declares {}", written_, header_.item_count));
  }
  out_.close();
  if (!out_) throw Error(ErrorKind::kIo, fmt::format("failed writing {}", path_.string()));
  finished_ = true;
}

// --- BundleReader ---------------------------------------------------------

struct BundleReader::Mapping {
  const std::byte* data = nullptr;
  std::size_t size = 0;

  Mapping() = default;
  Mapping(const Mapping&) = delete;
  Mapping& operator=(const Mapping&) = delete;
  ~Mapping() {
    if (data != nullptr) munmap(const_cast<std::byte*>(data), size);
  }
};

BundleReader::BundleReader(std::unique_ptr<Mapping> mapping, BundleHeader header,
                           std::size_t payload_offset, std::vector<std::string> id_table)
    : mapping_(std::move(mapping)),
      header_(std::move(header)),
      payload_offset_(payload_offset),
      id_table_(std::move(id_table)) {}

BundleReader::BundleReader(BundleReader&&) noexcept = default;
BundleReader& BundleReader::operator=(BundleReader&&) noexcept = default;
BundleReader::~BundleReader() = default;

BundleReader BundleReader::Open(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) throw Error(ErrorKind::kIo, fmt::format("cannot open {}", path.string()));
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw Error(ErrorKind::kIo, fmt::format("cannot stat {}", path.string()));
  }
  auto mapping = std::make_unique<Mapping>();
  mapping->size = static_cast<std::size_t>(st.st_size);
  if (mapping->size > 0) {
    void* p = ::mmap(nullptr, mapping->size, PROT_READ, MAP_PRIVATE, fd, 0);
    if (p == MAP_FAILED) {
      ::close(fd);
      throw Error(ErrorKind::kIo, fmt::format("cannot map {}", path.string()));
    }
    mapping->data = static_cast<const std::byte*>(p);
  }
  ::close(fd);

  const std::byte* bytes = mapping->data;
  const std::size_t size = mapping->size;
  if (size < kPrefixBytes) {
    throw Error(ErrorKind::kFormat, fmt::format("{}: file too short for an ADGE header", path.string()));
  }
  if (std::memcmp(bytes, kBundleMagic, sizeof(kBundleMagic)) != 0) {
    throw Error(ErrorKind::kFormat, fmt::format("{}: bad magic", path.string()));
  }
  std::uint32_t version = 0;
  std::memcpy(&version, bytes + 4, sizeof(version));
  if (version != kBundleVersion) {
    throw Error(ErrorKind::kFormat,
                fmt::format("{}: unsupported version {}", path.string(), version));
  }
  std::uint64_t json_length = 0;
  std::memcpy(&json_length, bytes + 8, sizeof(json_length));
  if (json_length > size - kPrefixBytes) {
    throw Error(ErrorKind::kFormat, fmt::format("{}: header length exceeds file size", path.string()));
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes + kPrefixBytes),
                              static_cast<std::size_t>(json_length));
  BundleHeader header = DecodeHeaderJson(text);
  header.Validate();

  const std::size_t offset = kPrefixBytes + static_cast<std::size_t>(json_length);
  const std::uint64_t available = size - offset;
  if (available != header.payload_bytes()) {
    throw Error(ErrorKind::kLength,
                fmt::format("{}: payload is {} bytes, header declares {}", path.string(),
                            available, header.payload_bytes()));
  }

  std::vector<std::string> ids;
  if (header.id_table_present) ids = ReadIdTable(IdTablePath(path), header.item_count);
  return BundleReader(std::move(mapping), std::move(header), offset, std::move(ids));
}

void BundleReader::Read(std::uint64_t index, std::span<float> out) const {
  if (index >= header_.item_count) {
    throw Error(ErrorKind::kDomain,
                fmt::format("item {} out of range (item_count {})", index, header_.item_count));
  }
  const std::uint64_t per_item = header_.floats_per_item();
  if (out.size() != per_item) {
    throw Error(ErrorKind::kLength,
                fmt::format("output buffer holds {} floats, item has {}", out.size(), per_item));
  }
  std::memcpy(out.data(),
              mapping_->data + payload_offset_ + index * per_item * sizeof(float),
              per_item * sizeof(float));
}

std::vector<float> BundleReader::Item(std::uint64_t index) const {
  std::vector<float> out(header_.floats_per_item());
  Read(index, out);
  return out;
}

std::span<const std::byte> BundleReader::payload() const {
  return {mapping_->data + payload_offset_, static_cast<std::size_t>(header_.payload_bytes())};
}

}  // namespace adg
