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

#include "mrsquant/basis.hpp"
#include "mrsquant/error.hpp"

using namespace mrsquant;

TEST_CASE("default basis") {
  const BasisSet basis = default_brain_basis();
  CHECK_NOTHROW(basis.validate());
  CHECK(basis.names() == std::vector<std::string>{"NAA", "Cr", "Cho", "mI", "Glx"});
  for (const auto& m : basis.metabolites) {
    double total = 0;
    for (const auto& c : m.components) total += c.amplitude;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(basis.contains("Cho"));
  CHECK_FALSE(basis.contains("GABA"));
  CHECK_THROWS_AS(basis.find("GABA"), LookupError);
}

TEST_CASE("basis validation") {
  BasisSet basis = default_brain_basis();
  basis.metabolites.push_back(basis.metabolites.front());
  CHECK_THROWS_WITH_AS(basis.validate(), doctest::Contains("NAA"), ArgumentError);
  basis = default_brain_basis();
  basis.metabolites[1].components.clear();
  CHECK_THROWS_AS(basis.validate(), ArgumentError);
  basis = default_brain_basis();
  basis.metabolites[0].components[0].t2_s = 0.0;
  CHECK_THROWS_AS(basis.validate(), ArgumentError);
}

TEST_CASE("rendering is linear in concentration") {
  const BasisSet basis = default_brain_basis();
  const auto one = render_metabolite(basis, "NAA", 1.0);
  const auto three = render_metabolite(basis, "NAA", 3.0);
  for (std::size_t j = 0; j < one.size(); ++j) {
    CHECK(std::abs(three.values[j] - 3.0 * one.values[j]) <= 1e-9 * one.max_magnitude());
  }
  const auto zero = render_metabolite(basis, "Cr", 0.0);
  CHECK(zero.max_magnitude() == 0.0);
}

TEST_CASE("linear combination equals the sum of rendered metabolites") {
  const BasisSet basis = default_brain_basis();
  const ConcentrationMap conc{{"NAA", 1.3}, {"Cr", 0.8}, {"Cho", 0.25}, {"mI", 0.4}};
  for (double t2_scale : {0.6, 1.0, 1.4}) {
    const auto combined = linear_combination(basis, conc, t2_scale);
    auto sum = zero_spectrum(basis.params, basis.reference_ppm);
    for (const auto& [name, c] : conc) sum = add(sum, render_metabolite(basis, name, c, t2_scale));
    const double scale = sum.max_magnitude();
    for (std::size_t j = 0; j < sum.size(); ++j) {
      CHECK(std::abs(combined.values[j] - sum.values[j]) <= 1e-9 * scale);
    }
  }
  CHECK_THROWS_AS(linear_combination(basis, {{"GABA", 1.0}}), LookupError);
}

TEST_CASE("t2 scale narrows or widens lines") {
  const BasisSet basis = default_brain_basis();
  const auto comps = scaled_components(basis.find("Cho"), 2.0, 1.5);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].amplitude == 2.0);
  CHECK(comps[0].t2_s == doctest::Approx(0.15));
  const double narrow = render_metabolite(basis, "Cho", 1.0, 1.4).max_magnitude();
  const double broad = render_metabolite(basis, "Cho", 1.0, 0.6).max_magnitude();
  CHECK(narrow > broad);
}

TEST_CASE("with_params re-renders on another protocol") {
  AcquisitionParams p;
  p.spectral_width_hz = 2000;
  p.n_points = 400;
  const BasisSet basis = default_brain_basis().with_params(p);
  CHECK(basis.params == p);
  const auto s = render_metabolite(basis, "NAA", 1.0);
  CHECK(s.size() == 400);
  std::size_t peak = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (std::abs(s.values[j]) > std::abs(s.values[peak])) peak = j;
  }
  CHECK(std::abs(s.ppm[peak] - 2.01) <= p.bin_width_ppm());
}
