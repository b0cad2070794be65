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

// Independent reference implementations used only by the tests.

#ifndef MRSQUANT_TESTS_ORACLES_HPP_
#define MRSQUANT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "mrsquant/signal.hpp"

namespace oracle {

using mrsquant::Complex;

// O(n^2) transform of a FID onto the spectrum axis: bin j sits at
// sw/2 - j*sw/n Hz relative to the reference.
inline std::vector<Complex> direct_dft(const std::vector<Complex>& fid, double sw) {
  const std::size_t n = fid.size();
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double f = sw / 2.0 - static_cast<double>(j) * sw / static_cast<double>(n);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = -2.0 * std::numbers::pi * f * static_cast<double>(k) / sw;
      acc += fid[k] * std::polar(1.0, phase);
    }
    out[j] = acc;
  }
  return out;
}

// Direct evaluation of the damped complex exponential.
inline std::vector<Complex> direct_fid(double offset_hz, double amplitude, double t2,
                                       double phase0, double sw, std::size_t n) {
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sw;
    out[k] = amplitude * std::exp(Complex(-t / t2, 2.0 * std::numbers::pi * offset_hz * t + phase0));
  }
  return out;
}

// Every optimal root split of a 1-D dataset, as open threshold intervals
// (lo, hi) between consecutive distinct values. Found by enumeration.
inline std::vector<std::pair<double, double>> best_split_intervals(
    std::vector<std::pair<double, double>> xy, std::size_t min_leaf) {
  std::sort(xy.begin(), xy.end());
  auto sse = [](auto first, auto last) {
    double n = 0, s = 0, ss = 0;
    for (auto it = first; it != last; ++it) {
      n += 1;
      s += it->second;
      ss += it->second * it->second;
    }
    return n == 0 ? 0.0 : ss - s * s / n;
  };
  double best = INFINITY;
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i < xy.size(); ++i) {
    if (xy[i - 1].first == xy[i].first) continue;
    if (i < min_leaf || xy.size() - i < min_leaf) continue;
    const double score = sse(xy.begin(), xy.begin() + i) + sse(xy.begin() + i, xy.end());
    if (score < best - 1e-12) {
      best = score;
      out.clear();
    }
    if (std::abs(score - best) <= 1e-12) out.emplace_back(xy[i - 1].first, xy[i].first);
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace oracle

#endif  // MRSQUANT_TESTS_ORACLES_HPP_
