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

#include "dpstream/rng.hpp"

namespace dpstream {

namespace {

inline uint64_t Mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

uint64_t RngStream::NextU64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return Mix64(state_);
}

double RngStream::NextUniform() {
  // 53-bit mantissa plus a half-ulp offset keeps the draw inside (0, 1),
  // which the Laplace inverse CDF requires.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

uint64_t DeriveSeed(uint64_t root_seed, std::string_view name) {
  uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a offset basis
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return Mix64(root_seed ^ Mix64(h));
}

}  // namespace dpstream
