// Copyright 2026 The rexp3 Authors.
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

#include "rexp3/rng.hpp"

namespace rexp3 {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace

Stream::Stream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : state_) {
    x += kGolden;
    word = mix64(x);
  }
  // All-zero state is a fixed point of xoshiro; SplitMix64 output cannot
  // produce four zero words in a row, so no fixup is needed.
}

Stream derive(std::uint64_t master_seed, std::uint64_t index) {
  const std::uint64_t key = mix64(master_seed ^ 0x5851F42D4C957F2DULL);
  return Stream(mix64(key + mix64((index + 1) * kGolden)));
}

}  // namespace rexp3
