/*
 * Copyright 2026 The dpfl-pareto Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFL_RNG_H_
#define DPFL_RNG_H_

#include <cstdint>
#include <random>

namespace dpfl {

// Every random draw in the simulator comes from a generator derived from
// (seed, round, client, stream). Streams never share state, so client updates
// can run on any thread in any order and still reproduce the same trace.
enum class RngStream : uint64_t {
  kInit = 1,
  kClientSampling = 2,
  kBatch = 3,
  kNoise = 4,
  kPartition = 5,
  kSynthTrain = 6,
  kSynthTest = 7,
  kSubsample = 8,
};

using Rng = std::mt19937_64;

// SplitMix64 finalizer chained over the four coordinates.
uint64_t MixSeed(uint64_t seed, uint64_t round, uint64_t client,
                 RngStream stream);

inline Rng MakeRng(uint64_t seed, uint64_t round, uint64_t client,
                   RngStream stream) {
  return Rng(MixSeed(seed, round, client, stream));
}

}  // namespace dpfl

#endif  // DPFL_RNG_H_
