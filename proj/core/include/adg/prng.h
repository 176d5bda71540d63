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

#ifndef ADG_PRNG_H_
#define ADG_PRNG_H_

#include <cstdint>
#include <string_view>

namespace adg {

// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, one add and a
// three-step mixer per draw. Pinned so that seeded outputs (k-means++
// initialization, synthetic pools) reproduce across platforms and languages.
class SplitMix64 {
 public:
  static constexpr std::string_view kAlgorithmId = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();

  // Uniform on [0, 1) with 53 bits of resolution.
  double NextUniform();

  // Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t NextBelow(std::uint64_t bound);

  // Standard normal via Box-Muller (one value per call, no caching).
  double NextGaussian();

  // Stateless mixer; used to derive independent per-item streams.
  static std::uint64_t Mix(std::uint64_t x);

  static SplitMix64 ForStream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(Mix(seed ^ Mix(stream + 0x9e3779b97f4a7c15ULL)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace adg

#endif  // ADG_PRNG_H_
