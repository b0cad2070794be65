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

#include <cmath>
#include <random>

#include "mrsquant/basis.hpp"
#include "mrsquant/error.hpp"
#include "mrsquant/preprocess.hpp"

using namespace mrsquant;

namespace {

ComplexSpectrum brain(const AcquisitionParams& p, double naa = 1.0, double cho = 0.3) {
  return linear_combination(default_brain_basis(p), {{"NAA", naa}, {"Cr", 1.0}, {"Cho", cho}});
}

ComplexSpectrum ramp(const AcquisitionParams& p) {
  auto s = zero_spectrum(p);
  for (std::size_t j = 0; j < s.size(); ++j) s.values[j] = {2.0 * s.ppm[j] - 1.0, -0.5 * s.ppm[j]};
  return s;
}

AcquisitionParams mrsi() {
  AcquisitionParams p;
  p.spectral_width_hz = 2000;
  p.n_points = 400;
  return p;
}

}  // namespace

TEST_CASE("crop") {
  const auto s = brain({});
  const auto full = crop_ppm(s, s.ppm.front(), s.ppm.back());
  CHECK(full.values == s.values);
  CHECK(full.ppm == s.ppm);

  const auto c = crop_ppm(s, 4.3, 0.2);
  REQUIRE(c.size() > 0);
  for (double p : c.ppm) CHECK((p >= 0.2 && p <= 4.3));
  CHECK(c.size() == 215);
  const auto twice = crop_ppm(c, 4.3, 0.2);
  CHECK(twice.values == c.values);
  CHECK(twice.ppm == c.ppm);

  CHECK_THROWS_AS(crop_ppm(s, 40.0, 30.0), RangeError);
  CHECK_THROWS_AS(crop_ppm(s, 1.0, 2.0), ArgumentError);
}

TEST_CASE("resample") {
  const auto s = brain({});
  CHECK(resample(s, s.ppm) == s.values);

  const auto r = ramp(mrsi());
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(r.ppm.back(), r.ppm.front());
  std::vector<double> grid;
  for (int i = 0; i < 500; ++i) grid.push_back(u(g));
  const auto out = resample(r, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(out[i] - Complex(2.0 * grid[i] - 1.0, -0.5 * grid[i])) <= 1e-12);
  }

  const std::vector<double> outside{r.ppm.front() + 0.01};
  CHECK_THROWS_AS(resample(r, outside), RangeError);
}

TEST_CASE("zero filling interpolates between the original bins") {
  const auto s = brain(mrsi());
  const auto same = zero_fill(s, s.size());
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(same.values[j] - s.values[j]) <= 1e-9);
  const auto twice = zero_fill(s, 2 * s.size());
  REQUIRE(twice.size() == 800);
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(twice.ppm[2 * j] == doctest::Approx(s.ppm[j]).epsilon(1e-12));
    CHECK(std::abs(twice.values[2 * j] - s.values[j]) <= 1e-9 * s.max_magnitude());
  }
  CHECK_THROWS_AS(zero_fill(s, 399), ArgumentError);
  CHECK_THROWS_AS(zero_fill(crop_ppm(s, 4.3, 0.2), 800), ArgumentError);
}

TEST_CASE("400-point spectra resample onto the training grid") {
  const auto train = crop_ppm(brain({}), 4.3, 0.2);
  FeaturePipeline pipeline = FeaturePipeline::fit(std::vector<ComplexSpectrum>{brain({})});
  const auto fv = pipeline.apply(brain(mrsi()), true);
  CHECK(fv.values.size() == train.size());
  CHECK(fv.ppm_grid == train.ppm);
}

TEST_CASE("normalize") {
  const auto s = crop_ppm(brain({}), 4.3, 0.2);
  const auto own = normalize_to_reference(s.values, s.values);
  for (std::size_t j = 0; j < s.size(); ++j) {
    CHECK(std::abs(std::abs(own[j]) - std::abs(s.values[j])) <= 1e-12);
  }
  for (double c : {1e-3, 0.5, 10.0, 1e4}) {
    std::vector<Complex> scaled(s.values);
    for (auto& v : scaled) v *= c;
    const auto a = normalize_to_reference(scaled, 2.5);
    const auto b = normalize_to_reference(s.values, 2.5);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
    CHECK(std::abs(max_magnitude(a) - 2.5) <= 1e-9);
  }
  const std::vector<Complex> zero(10);
  CHECK_THROWS_AS(normalize_to_reference(zero, 1.0), PreconditionError);
}

TEST_CASE("pipeline reference is the median-peak training spectrum") {
  std::vector<ComplexSpectrum> train;
  for (double naa : {3.0, 1.0, 2.0, 5.0, 4.0}) train.push_back(brain({}, naa));
  const auto p = FeaturePipeline::fit(train);
  CHECK(p.reference_index == 0);
  CHECK(p.reference_max_magnitude == max_magnitude(crop_ppm(train[0], 4.3, 0.2).values));
  train.pop_back();
  CHECK(FeaturePipeline::fit(train).reference_index == 2);  // lower median of {1,2,3,5}
  CHECK_THROWS_AS(FeaturePipeline::fit(std::vector<ComplexSpectrum>{}), ArgumentError);
}

TEST_CASE("pipeline on the training protocol is crop plus normalization") {
  const std::vector<ComplexSpectrum> train{brain({}, 1.0), brain({}, 2.0), brain({}, 1.5)};
  const auto p = FeaturePipeline::fit(train);
  for (const auto& s : train) {
    CHECK(p.matches_grid(s));
    const auto fv = p.apply(s);
    const auto c = crop_ppm(s, 4.3, 0.2);
    const double scale = p.reference_max_magnitude / max_magnitude(c.values);
    for (std::size_t j = 0; j < c.size(); ++j) {
      CHECK(fv.values[j] == doctest::Approx(c.values[j].real() * scale).epsilon(1e-12));
    }
  }
  const auto other = brain(mrsi());
  CHECK_FALSE(p.matches_grid(other));
  CHECK_THROWS_AS(p.apply(other), CompatibilityError);
}

TEST_CASE("pipeline is scale-invariant") {
  const auto p = FeaturePipeline::fit(std::vector<ComplexSpectrum>{brain({})});
  for (const auto& params : {AcquisitionParams{}, mrsi()}) {
    const auto s = brain(params, 1.4, 0.45);
    auto big = s;
    for (auto& v : big.values) v *= 10.0;
    const auto a = p.apply(s, true), b = p.apply(big, true);
    REQUIRE(a.values.size() == p.n_features());
    for (std::size_t j = 0; j < a.values.size(); ++j) {
      CHECK(std::abs(a.values[j] - b.values[j]) <= 1e-9 * p.reference_max_magnitude);
    }
  }
}
