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

// Evaluation metrics: relative estimate error, Pearson correlation, boxplot
// summaries and k-fold partitions.

#ifndef MRSQUANT_METRICS_HPP_
#define MRSQUANT_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mrsquant {

// |estimate - truth| / |truth|. Throws NumericalError when truth == 0.
double relative_error(double estimate, double truth);

// Pearson correlation. Throws ArgumentError on length mismatch or fewer than
// two points and NumericalError when either input is constant.
double r_score(std::span<const double> estimates, std::span<const double> truths);

struct BoxplotStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;

  bool operator==(const BoxplotStats&) const = default;
};

// Median is the midpoint of the two central values for even lengths;
// quartiles interpolate linearly between order statistics.
// Throws ArgumentError when empty.
BoxplotStats boxplot_stats(std::span<const double> values);

// Linear-interpolated quantile of already sorted values, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

// Random partition of [0, n) into k folds whose sizes differ by at most one.
// Each fold is sorted. Throws ArgumentError unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

}  // namespace mrsquant

#endif  // MRSQUANT_METRICS_HPP_
