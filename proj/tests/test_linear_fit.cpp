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

#include "mrsquant/error.hpp"
#include "mrsquant/linear_fit.hpp"
#include "mrsquant/preprocess.hpp"
#include "mrsquant/random.hpp"
#include "mrsquant/simulator.hpp"

using namespace mrsquant;

TEST_CASE("noiseless recovery") {
  const BasisSet basis = default_brain_basis();
  const ConcentrationMap truth{{"NAA", 1.2}, {"Cr", 0.9}, {"Cho", 0.3}};
  const auto s = linear_combination(basis, truth);
  for (int degree : {0, 2, 4}) {
    const auto fit = lsq_fit(s, basis, degree);
    CHECK_FALSE(fit.rank_deficient);
    CHECK(fit.baseline_coeffs.size() == static_cast<std::size_t>(degree + 1));
    for (const auto& [name, value] : fit.concentrations) {
      const double expect = truth.contains(name) ? truth.at(name) : 0.0;
      CHECK(std::abs(value - expect) <= 1e-6);
    }
    const auto ratios = fit_ratios(fit);
    CHECK(std::abs(ratios.at("NAA/Cr") - 1.2 / 0.9) <= 1e-6);
    CHECK(std::abs(ratios.at("Cho/Cr") - 0.3 / 0.9) <= 1e-6);
  }
}

TEST_CASE("zero spectrum fits to zero") {
  const BasisSet basis = default_brain_basis();
  const auto fit = lsq_fit(zero_spectrum(basis.params), basis);
  for (const auto& [name, value] : fit.concentrations) CHECK(value == 0.0);
  for (double c : fit.baseline_coeffs) CHECK(c == 0.0);
  CHECK(fit.residual_norm == 0.0);
  CHECK_THROWS_AS(fit_ratios(fit), NumericalError);
}

TEST_CASE("polynomial baseline is absorbed") {
  const BasisSet basis = default_brain_basis();
  auto s = linear_combination(basis, {{"NAA", 1.0}, {"Cr", 1.0}, {"Cho", 0.2}});
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double x = (s.ppm[j] - 2.25) / 2.05;
    s.values[j] += 3.0 - 2.0 * x + 0.5 * x * x * x;
  }
  const auto fit = lsq_fit(s, basis, 4);
  CHECK(std::abs(fit.concentrations.at("NAA") - 1.0) <= 1e-6);
  CHECK(std::abs(fit.baseline_coeffs[0] - 3.0) <= 1e-6);
  CHECK(std::abs(fit.baseline_coeffs[1] + 2.0) <= 1e-6);
  CHECK(std::abs(fit.baseline_coeffs[3] - 0.5) <= 1e-6);
}

TEST_CASE("residual is orthogonal to the design and tracks the noise") {
  const BasisSet basis = default_brain_basis();
  const LinearFitOracle oracle(basis, basis.params, basis.reference_ppm);
  const auto clean = linear_combination(basis, {{"NAA", 1.4}, {"Cr", 1.0}, {"Cho", 0.35}});
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = derive_stream(3, StreamTag::kNoise, i);
    const auto noisy = add_noise(clean, 20.0, rng);
    const auto fit = oracle.fit(noisy);
    const Eigen::Map<const Eigen::VectorXd> r(fit.residual.data(),
                                              static_cast<Eigen::Index>(fit.residual.size()));
    const Eigen::VectorXd dots = oracle.design().transpose() * r;
    for (Eigen::Index c = 0; c < dots.size(); ++c) {
      const double scale = oracle.design().col(c).norm() * r.norm();
      CHECK(std::abs(dots(c)) <= 1e-8 * scale);
    }
    const auto a = crop_ppm(noisy, 4.3, 0.2), b = crop_ppm(clean, 4.3, 0.2);
    double noise = 0;
    for (std::size_t j = 0; j < a.size(); ++j) noise += std::pow(a.values[j].real() - b.values[j].real(), 2);
    noise = std::sqrt(noise);
    CHECK(fit.residual_norm > 0.0);
    CHECK(std::abs(fit.residual_norm - noise) <= 0.2 * noise);
  }
}

TEST_CASE("scale equivariance") {
  const BasisSet basis = default_brain_basis();
  SimulationConfig c;
  c.n_spectra = 5;
  c.rng_seed = 8;
  const auto records = simulate_dataset(c, 1);
  for (const auto& r : records) {
    const auto base = lsq_fit(r.spectrum, basis);
    auto scaled = r.spectrum;
    for (auto& v : scaled.values) v *= 7.5;
    const auto fit = lsq_fit(scaled, basis);
    for (const auto& [name, value] : base.concentrations) {
      CHECK(fit.concentrations.at(name) == doctest::Approx(7.5 * value).epsilon(1e-9));
    }
    if (base.concentrations.at("Cr") > 0) {
      const auto ra = fit_ratios(base), rb = fit_ratios(fit);
      for (const auto& [name, value] : ra) CHECK(rb.at(name) == doctest::Approx(value).epsilon(1e-9));
    }
  }
}

TEST_CASE("ratios equal labels on clean simulations") {
  SimulationConfig c;
  c.n_spectra = 100;
  c.rng_seed = 4;
  c.enable_noise = false;
  c.baseline_amplitude_range = {0, 0};
  c.lipid_amplitude_range = {0, 0};
  c.t2_scale_range = {1, 1};
  const auto records = simulate_dataset(c, 1);
  const LinearFitOracle oracle(c.basis, c.basis.params, c.basis.reference_ppm);
  for (const auto& r : records) {
    const auto ratios = fit_ratios(oracle.fit(r.spectrum));
    for (const auto& [target, label] : r.labels) CHECK(std::abs(ratios.at(target) - label) <= 1e-6);
  }
}

TEST_CASE("fit_ratios") {
  FitResult r;
  r.concentrations = {{"NAA", 2.0}, {"Cr", 1.0}};
  CHECK(fit_ratios(r).at("NAA/Cr") == 2.0);
  r.concentrations = {{"NAA", 1.0}, {"Cr", 0.0}};
  CHECK_THROWS_AS(fit_ratios(r), NumericalError);
  r.concentrations = {{"NAA", 1.0}, {"Cr", -0.5}};
  CHECK_THROWS_AS(fit_ratios(r), NumericalError);
  r.concentrations = {{"NAA", 1.0}};
  CHECK_THROWS_AS(fit_ratios(r), LookupError);
}

TEST_CASE("rank deficiency is flagged with a minimum-norm answer") {
  BasisSet basis = default_brain_basis();
  basis.metabolites.push_back({"NAA2", basis.find("NAA").components});
  const auto s = linear_combination(basis, {{"NAA", 1.0}, {"Cr", 1.0}});
  const auto fit = lsq_fit(s, basis);
  CHECK(fit.rank_deficient);
  CHECK(fit.concentrations.at("NAA") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.concentrations.at("NAA2") == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("grid mismatch is a compatibility error") {
  const BasisSet basis = default_brain_basis();
  const LinearFitOracle oracle(basis, basis.params, basis.reference_ppm);
  AcquisitionParams p;
  p.n_points = 400;
  p.spectral_width_hz = 2000;
  CHECK_THROWS_AS(oracle.fit(zero_spectrum(p)), CompatibilityError);
  OracleConfig bad;
  bad.baseline_degree = -1;
  CHECK_THROWS_AS(LinearFitOracle(basis, basis.params, basis.reference_ppm, bad), ArgumentError);
}
