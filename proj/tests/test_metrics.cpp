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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mrsquant/error.hpp"
#include "mrsquant/metrics.hpp"

using namespace mrsquant;

TEST_CASE("relative error") {
  CHECK(relative_error(3.0, 3.0) == 0.0);
  CHECK(relative_error(1.1, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(relative_error(0.0, 2.0) == 1.0);
  CHECK(relative_error(-1.0, -2.0) == 0.5);
  CHECK_THROWS_AS(relative_error(1.0, 0.0), NumericalError);

  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double e = u(g), t = u(g), c = u(g);
    if (t == 0.0 || c == 0.0) continue;
    CHECK(relative_error(c * e, c * t) == doctest::Approx(relative_error(e, t)).epsilon(1e-12));
  }
}

TEST_CASE("pearson r") {
  const std::vector<double> t{1, 2, 3, 5, 8};
  CHECK(r_score(t, t) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg(t);
  for (auto& v : neg) v = -v;
  CHECK(r_score(neg, t) == doctest::Approx(-1.0).epsilon(1e-15));

  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(20), y(20);
    for (auto& v : x) v = u(g);
    for (auto& v : y) v = u(g);
    const double r = r_score(y, x);
    CHECK((r >= -1.0 && r <= 1.0));
    const double a = std::abs(u(g)) + 0.1, b = u(g);
    std::vector<double> affine(x);
    for (auto& v : affine) v = a * v + b;
    CHECK(std::abs(r_score(affine, x) - 1.0) <= 1e-12);
    std::vector<double> ya(y);
    for (auto& v : ya) v = a * v + b;
    CHECK(std::abs(r_score(ya, x) - r) <= 1e-12);
  }

  const std::vector<double> flat(5, 2.0), one{1.0}, four{1, 2, 3, 4};
  CHECK_THROWS_AS(r_score(t, flat), NumericalError);
  CHECK_THROWS_AS(r_score(flat, t), NumericalError);
  CHECK_THROWS_AS(r_score(one, one), ArgumentError);
  CHECK_THROWS_AS(r_score(four, t), ArgumentError);
}

TEST_CASE("boxplot statistics") {
  const std::vector<double> single{5.0};
  const auto s = boxplot_stats(single);
  CHECK(s.min == 5);
  CHECK(s.q1 == 5);
  CHECK(s.median == 5);
  CHECK(s.q3 == 5);
  CHECK(s.max == 5);
  CHECK(s.mean == 5);

  const std::vector<double> four{4, 1, 3, 2};
  const auto f = boxplot_stats(four);
  CHECK(f.median == 2.5);
  CHECK(f.min == 1);
  CHECK(f.max == 4);
  CHECK(f.q1 == 1.75);
  CHECK(f.q3 == 3.25);
  CHECK(f.mean == 2.5);
  CHECK(f.count == 4);

  const std::vector<double> odd{7, 1, 3};
  CHECK(boxplot_stats(odd).median == 3);

  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + trial % 17);
    for (auto& x : v) x = u(g);
    const auto a = boxplot_stats(v);
    std::shuffle(v.begin(), v.end(), g);
    CHECK(boxplot_stats(v) == a);
    CHECK(a.min <= a.q1);
    CHECK(a.q1 <= a.median);
    CHECK(a.median <= a.q3);
    CHECK(a.q3 <= a.max);
  }
  CHECK_THROWS_AS(boxplot_stats(std::vector<double>{}), ArgumentError);
}

TEST_CASE("sorted quantile") {
  const std::vector<double> v{0, 10, 20, 30};
  CHECK(sorted_quantile(v, 0.0) == 0);
  CHECK(sorted_quantile(v, 1.0) == 30);
  CHECK(sorted_quantile(v, 0.5) == 15);
  CHECK(sorted_quantile(v, 0.25) == 7.5);
}

TEST_CASE("k-fold partitions") {
  for (std::size_t n : {2u, 7u, 10u, 50u, 287u, 1000u}) {
    for (std::size_t k : {2u, 3u, 5u, 10u}) {
      if (k > n) continue;
      const auto folds = kfold_split(n, k, n * 31 + k);
      REQUIRE(folds.size() == k);
      std::set<std::size_t> seen;
      std::size_t smallest = n, largest = 0;
      for (const auto& f : folds) {
        CHECK(std::is_sorted(f.begin(), f.end()));
        smallest = std::min(smallest, f.size());
        largest = std::max(largest, f.size());
        for (std::size_t i : f) {
          CHECK(i < n);
          CHECK(seen.insert(i).second);
        }
      }
      CHECK(seen.size() == n);
      CHECK(largest - smallest <= 1);
    }
  }
}

TEST_CASE("k-fold shape of the 287-subject cohort") {
  const auto folds = kfold_split(287, 10, 42);
  std::size_t of29 = 0, of28 = 0;
  for (const auto& f : folds) {
    of29 += f.size() == 29;
    of28 += f.size() == 28;
    CHECK(287 - f.size() >= 258);
  }
  CHECK(of29 == 7);
  CHECK(of28 == 3);
  CHECK(std::count_if(folds.begin(), folds.end(),
                      [](const auto& f) { return 287 - f.size() == 259; }) == 3);
}

TEST_CASE("k-fold edge cases") {
  const auto singletons = kfold_split(10, 10, 1);
  for (const auto& f : singletons) CHECK(f.size() == 1);
  CHECK(kfold_split(100, 10, 5) == kfold_split(100, 10, 5));
  CHECK(kfold_split(100, 10, 5) != kfold_split(100, 10, 6));
  CHECK_THROWS_AS(kfold_split(5, 6, 0), ArgumentError);
  CHECK_THROWS_AS(kfold_split(5, 1, 0), ArgumentError);
}
