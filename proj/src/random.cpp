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

#include "mrsquant/random.hpp"

#include <cmath>

namespace mrsquant {

Rng derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a,
                  std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), static_cast<std::uint32_t>(tag),
                    lo(a),    hi(a),    lo(b),
                    hi(b)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
  // 53 random mantissa bits; portable unlike uniform_real_distribution.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

Complex circular_gaussian(Rng& rng, double sigma) {
  // Box-Muller on portable uniforms; each quadrature has variance sigma^2/2.
  double u1;
  do {
    u1 = uniform(rng, 0.0, 1.0);
  } while (u1 <= 0.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  const double radius = sigma * std::sqrt(-std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace mrsquant
