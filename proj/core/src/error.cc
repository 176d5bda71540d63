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

#include "adg/error.h"

#include <fmt/format.h>

namespace adg {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kLength: return "length";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kSolver: return "solver";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kInfeasibleBudget: return "infeasible_budget";
    case ErrorKind::kDegenerateAnswer: return "degenerate_answer";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::uint64_t> item)
    : std::runtime_error(message), kind_(kind), item_(item) {}

Error Error::WithItem(std::uint64_t item) const {
  if (item_.has_value()) return *this;
  return Error(kind_, fmt::format("instruction {}: {}", item, what()), item);
}

}  // namespace adg
