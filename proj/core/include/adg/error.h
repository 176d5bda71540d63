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

#ifndef ADG_ERROR_H_
#define ADG_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace adg {

enum class ErrorKind {
  kFormat,            // bad magic, version or malformed header/record
  kLength,            // payload size does not match the header contract
  kDomain,            // value outside the mathematical domain (K < 2, PSD violation)
  kConfig,            // invalid configuration
  kData,              // non-finite or otherwise unusable input values
  kSolver,            // eigensolver failed to converge
  kConsistency,       // inputs that must agree do not
  kInfeasibleBudget,  // budget exceeds pool size
  kDegenerateAnswer,  // zero-norm answer embedding
  kIo,                // filesystem failure
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type. `item` is
// set when the failure can be attributed to a single instruction.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::uint64_t> item = std::nullopt);

  ErrorKind kind() const { return kind_; }
  const std::optional<std::uint64_t>& item() const { return item_; }

  // Returns a copy of this error tagged with an instruction id.
  Error WithItem(std::uint64_t item) const;

 private:
  ErrorKind kind_;
  std::optional<std::uint64_t> item_;
};

}  // namespace adg

#endif  // ADG_ERROR_H_
