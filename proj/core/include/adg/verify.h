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

#ifndef ADG_VERIFY_H_
#define ADG_VERIFY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adg {

// Deliberate defects used to show the suite catches them.
enum class Fault {
  kNone,
  kSkipCentering,  // Gram step uses V V^T instead of the centered form
  kNaiveRounding,  // quotas rounded independently per bin
};

std::optional<Fault> ParseFault(std::string_view name);
std::string_view FaultName(Fault fault);

struct VerifyOptions {
  Fault fault = Fault::kNone;
  std::uint64_t seed = 7;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the oracle suite: dispersion identity, hand-derived constants, Gram
// path equivalence, translation/rotation/rescaling invariance, eigen
// trace/Frobenius/reconstruction identities, quota exactness over
// randomized configurations, and thread-count determinism.
std::vector<CheckResult> RunVerification(const VerifyOptions& options = {});

}  // namespace adg

#endif  // ADG_VERIFY_H_
