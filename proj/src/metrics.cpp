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

#include "mrsquant/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrsquant/error.hpp"
#include "mrsquant/random.hpp"

namespace mrsquant {

double relative_error(double estimate, double truth) {
  if (truth == 0.0) throw NumericalError("relative error undefined for zero truth");
  return std::abs(estimate - truth) / std::abs(truth);
}

double r_score(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) {
    throw ArgumentError("r_score: " + std::to_string(estimates.size()) +
                        " estimates vs " + std::to_string(truths.size()) + " truths");
  }
  if (truths.size() < 2) throw ArgumentError("r_score needs at least two points");
  const double n = static_cast<double>(truths.size());
  const double mean_e = std::accumulate(estimates.begin(), estimates.end(), 0.0) / n;
  const double mean_t = std::accumulate(truths.begin(), truths.end(), 0.0) / n;
  double see = 0.0, stt = 0.0, set = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double de = estimates[i] - mean_e;
    const double dt = truths[i] - mean_t;
    see += de * de;
    stt += dt * dt;
    set += de * dt;
  }
  if (stt == 0.0) throw NumericalError("r_score undefined: truths are constant");
  if (see == 0.0) throw NumericalError("r_score undefined: estimates are constant");
  return std::clamp(set / std::sqrt(see * stt), -1.0, 1.0);
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("boxplot_stats of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  BoxplotStats s;
  s.count = n;
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = n % 2 == 1 ? sorted[n / 2]
                        : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  s.q1 = sorted_quantile(sorted, 0.25);
  s.q3 = sorted_quantile(sorted, 0.75);
  // Summing in sorted order makes the mean independent of input order.
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
           static_cast<double>(n);
  return s;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
  if (k < 2) throw ArgumentError("kfold_split needs k >= 2");
  if (k > n) {
    throw ArgumentError("kfold_split: k=" + std::to_string(k) + " exceeds n=" +
                        std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = derive_stream(seed, StreamTag::kFolds, n, k);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

}  // namespace mrsquant
