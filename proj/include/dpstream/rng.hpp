// Copyright 2026 The dpstream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSTREAM_RNG_HPP_
#define DPSTREAM_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace dpstream {

// Deterministic SplitMix-style 64-bit generator. One instance is one named
// noise stream; every random draw in the project flows from a root seed
// expanded into such streams, so identical (seed, stream name) pairs always
// produce identical draw sequences regardless of platform or call order in
// other streams.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t NextU64();

  // Uniform draw in the open interval (0, 1). Uses the top 53 bits of one
  // 64-bit output, offset by half an ulp so 0 and 1 are unreachable.
  double NextUniform();

 private:
  uint64_t state_;
};

// Seed of the sub-stream `name` rooted at `root_seed`. The name is folded
// with FNV-1a and mixed through the SplitMix finalizer.
uint64_t DeriveSeed(uint64_t root_seed, std::string_view name);

inline RngStream DeriveStream(uint64_t root_seed, std::string_view name) {
  return RngStream(DeriveSeed(root_seed, name));
}

}  // namespace dpstream

#endif  // DPSTREAM_RNG_HPP_
