/*
 * Copyright 2026 The mrsquant Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Seeded random streams. Every consumer derives its own engine from a seed
// plus stream coordinates, so results never depend on evaluation order.

#ifndef MRSQUANT_RANDOM_HPP_
#define MRSQUANT_RANDOM_HPP_

#include <cstdint>
#include <random>

#include "mrsquant/signal.hpp"

namespace mrsquant {

using Rng = std::mt19937_64;

// Stream tags keep the sub-streams of one record independent.
enum class StreamTag : std::uint32_t {
  kParameters = 1,
  kBaseline = 2,
  kLipids = 3,
  kNoise = 4,
  kBootstrap = 5,
  kTreeSplits = 6,
  kFolds = 7,
};

Rng derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a,
                  std::uint64_t b = 0);

// Uniform on [lo, hi]; returns lo exactly when lo == hi.
double uniform(Rng& rng, double lo, double hi);

// Index uniform on [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Circular complex Gaussian with E|z|^2 = sigma^2.
Complex circular_gaussian(Rng& rng, double sigma);

}  // namespace mrsquant

#endif  // MRSQUANT_RANDOM_HPP_
