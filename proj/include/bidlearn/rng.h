// Copyright 2026 The bidlearn Authors.
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

#ifndef BIDLEARN_RNG_H_
#define BIDLEARN_RNG_H_

#include <cstdint>
#include <random>

namespace bidlearn {

using Rng = std::mt19937_64;

// Derives an independent 64-bit stream seed from a master seed and a stream
// label, so that adding or changing one stream never shifts another.
inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer applied to the combined key.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream labels used by the simulation engine.
enum class Stream : std::uint64_t {
  kValues = 1,
  kTieBreak = 2,
  kPolicyBase = 1000,  // + bidder index
  kValueBase = 2000,   // + bidder index
};

inline Rng MakeStream(std::uint64_t master, Stream stream,
                      std::uint64_t offset = 0) {
  return Rng(DeriveSeed(master, static_cast<std::uint64_t>(stream) + offset));
}

}  // namespace bidlearn

#endif  // BIDLEARN_RNG_H_
