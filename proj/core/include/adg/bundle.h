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

#ifndef ADG_BUNDLE_H_
#define ADG_BUNDLE_H_

// ADGE embedding bundles.
//
// Layout (all integers little-endian):
//   bytes 0..3    magic "ADGE"
//   bytes 4..7    u32 version (= 1)
//   bytes 8..15   u64 length L of the JSON header
//   next L bytes  UTF-8 JSON object (compact, keys sorted), right-padded with
//                 spaces so the payload starts on an 8-byte boundary
//   payload       item_count * vectors_per_item * dim float32 values,
//                 row-major over (item, vector, dim)
//
// JSON header keys: kind ("answers" | "semantic"), item_count,
// vectors_per_item, dim, dtype ("f32le"), id_table_present, and an optional
// string-to-string "metadata" object. When id_table_present is true, the
// sidecar file "<bundle>.ids" holds one external key per line, in row order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace adg {

inline constexpr char kBundleMagic[4] = {'A', 'D', 'G', 'E'};
inline constexpr std::uint32_t kBundleVersion = 1;

enum class BundleKind { kAnswers, kSemantic };

struct BundleHeader {
  BundleKind kind = BundleKind::kAnswers;
  std::uint64_t item_count = 0;
  std::uint32_t vectors_per_item = 0;
  std::uint32_t dim = 0;
  bool id_table_present = false;
  std::map<std::string, std::string> metadata;

  std::uint64_t floats_per_item() const {
    return static_cast<std::uint64_t>(vectors_per_item) * dim;
  }
  std::uint64_t payload_bytes() const {
    return item_count * floats_per_item() * sizeof(float);
  }

  // Throws Error{kFormat} on zero counts and Error{kDomain} for an answers
  // bundle with fewer than two vectors per item.
  void Validate() const;

  bool operator==(const BundleHeader&) const = default;
};

// Read-only access to fixed-shape items. Implementations must allow
// concurrent Read calls.
class ItemSource {
 public:
  virtual ~ItemSource() = default;
  virtual std::uint64_t item_count() const = 0;
  virtual std::uint32_t vectors_per_item() const = 0;
  virtual std::uint32_t dim() const = 0;
  // Copies item `index` (vectors_per_item * dim floats) into `out`.
  virtual void Read(std::uint64_t index, std::span<float> out) const = 0;
};

// Items held in a contiguous float buffer.
class MemoryItemSource final : public ItemSource {
 public:
  MemoryItemSource(std::vector<float> values, std::uint64_t items,
                   std::uint32_t vectors_per_item, std::uint32_t dim);

  std::uint64_t item_count() const override { return items_; }
  std::uint32_t vectors_per_item() const override { return vectors_per_item_; }
  std::uint32_t dim() const override { return dim_; }
  void Read(std::uint64_t index, std::span<float> out) const override;

  std::span<const float> values() const { return values_; }

 private:
  std::vector<float> values_;
  std::uint64_t items_;
  std::uint32_t vectors_per_item_;
  std::uint32_t dim_;
};

// Writes a complete bundle. Rejects non-finite values (naming the
// offending item, vector and dim) and payload length mismatches. Output is
// byte-identical for identical inputs.
void WriteBundle(const std::filesystem::path& path, const BundleHeader& header,
                 std::span<const float> vectors,
                 std::span<const std::string> id_table = {});

// Streaming writer for bundles too large to stage in memory. Items must be
// appended in id order; Finish() verifies the item count.
class BundleWriter {
 public:
  BundleWriter(const std::filesystem::path& path, BundleHeader header);
  ~BundleWriter();
  BundleWriter(const BundleWriter&) = delete;
  BundleWriter& operator=(const BundleWriter&) = delete;

  void Append(std::span<const float> item);
  void Finish();

  std::uint64_t items_written() const { return written_; }

 private:
  std::filesystem::path path_;
  BundleHeader header_;
  std::ofstream out_;
  std::uint64_t written_ = 0;
  bool finished_ = false;
};

class BundleReader final : public ItemSource {
 public:
  // Maps the file and validates the header and payload length.
  static BundleReader Open(const std::filesystem::path& path);

  BundleReader(BundleReader&&) noexcept;
  BundleReader& operator=(BundleReader&&) noexcept;
  ~BundleReader() override;

  const BundleHeader& header() const { return header_; }
  const std::vector<std::string>& id_table() const { return id_table_; }

  std::uint64_t item_count() const override { return header_.item_count; }
  std::uint32_t vectors_per_item() const override {
    return header_.vectors_per_item;
  }
  std::uint32_t dim() const override { return header_.dim; }
  void Read(std::uint64_t index, std::span<float> out) const override;

  std::vector<float> Item(std::uint64_t index) const;

  // Raw little-endian payload bytes.
  std::span<const std::byte> payload() const;

 private:
  struct Mapping;
  BundleReader(std::unique_ptr<Mapping> mapping, BundleHeader header,
               std::size_t payload_offset, std::vector<std::string> id_table);

  std::unique_ptr<Mapping> mapping_;
  BundleHeader header_;
  std::size_t payload_offset_ = 0;
  std::vector<std::string> id_table_;
};

std::string_view BundleKindName(BundleKind kind);

// Path of the optional id-table sidecar for a bundle.
std::filesystem::path IdTablePath(const std::filesystem::path& bundle);

}  // namespace adg

#endif  // ADG_BUNDLE_H_
