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

#include "mrsquant/linear_fit.hpp"

#include <cmath>
#include <string>

#include "mrsquant/error.hpp"

namespace mrsquant {

void OracleConfig::validate() const {
  if (baseline_degree < 0) throw ArgumentError("oracle.baseline_degree must be >= 0");
  if (!(crop_high_ppm > crop_low_ppm)) {
    throw ArgumentError("oracle crop window needs high > low");
  }
}

LinearFitOracle::LinearFitOracle(const BasisSet& basis,
                                 const AcquisitionParams& params,
                                 double reference_ppm, const OracleConfig& config)
    : names_(basis.names()), config_(config) {
  config.validate();
  BasisSet rendered = basis.with_params(params);
  rendered.reference_ppm = reference_ppm;
  rendered.validate();

  std::vector<ComplexSpectrum> columns;
  for (const auto& name : names_) {
    columns.push_back(crop_ppm(render_metabolite(rendered, name, 1.0),
                               config.crop_high_ppm, config.crop_low_ppm));
  }
  window_ppm_ = columns.empty()
                    ? crop_ppm(zero_spectrum(params, reference_ppm),
                               config.crop_high_ppm, config.crop_low_ppm)
                          .ppm
                    : columns.front().ppm;

  const auto m = static_cast<Eigen::Index>(window_ppm_.size());
  const auto p = static_cast<Eigen::Index>(names_.size());
  const auto q = static_cast<Eigen::Index>(config.baseline_degree + 1);
  design_.resize(m, p + q);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      design_(r, c) = columns[static_cast<std::size_t>(c)]
                          .values[static_cast<std::size_t>(r)]
                          .real();
    }
  }
  const double centre = 0.5 * (config.crop_high_ppm + config.crop_low_ppm);
  const double half = 0.5 * (config.crop_high_ppm - config.crop_low_ppm);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double x = (window_ppm_[static_cast<std::size_t>(r)] - centre) / half;
    double power = 1.0;
    for (Eigen::Index k = 0; k < q; ++k) {
      design_(r, p + k) = power;
      power *= x;
    }
  }
  solver_.compute(design_);
}

FitResult LinearFitOracle::fit(const ComplexSpectrum& spectrum) const {
  const auto window =
      crop_ppm(spectrum, config_.crop_high_ppm, config_.crop_low_ppm);
  if (window.ppm != window_ppm_) {
    throw CompatibilityError(
        "spectrum is not on the oracle's grid; preprocess it first");
  }
  const auto m = static_cast<Eigen::Index>(window_ppm_.size());
  Eigen::VectorXd b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    b(r) = window.values[static_cast<std::size_t>(r)].real();
  }
  const Eigen::VectorXd theta = solver_.solve(b);
  const Eigen::VectorXd residual = b - design_ * theta;

  FitResult result;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    result.concentrations[names_[c]] = theta(static_cast<Eigen::Index>(c));
  }
  for (Eigen::Index k = static_cast<Eigen::Index>(names_.size());
       k < theta.size(); ++k) {
    result.baseline_coeffs.push_back(theta(k));
  }
  result.residual.assign(residual.data(), residual.data() + residual.size());
  result.residual_norm = residual.norm();
  result.rank_deficient = solver_.rank() < design_.cols();
  return result;
}

FitResult lsq_fit(const ComplexSpectrum& spectrum, const BasisSet& basis,
                  int baseline_degree) {
  OracleConfig config;
  config.baseline_degree = baseline_degree;
  return LinearFitOracle(basis, spectrum.params, spectrum.reference_ppm, config)
      .fit(spectrum);
}

std::map<std::string, double> fit_ratios(const FitResult& result,
                                         const std::string& reference) {
  const auto it = result.concentrations.find(reference);
  if (it == result.concentrations.end()) {
    throw LookupError("fit has no '" + reference + "' coefficient");
  }
  const double denominator = it->second;
  if (!(denominator > 0.0)) {
    throw NumericalError("ratio undefined: " + reference + " coefficient is " +
                         std::to_string(denominator));
  }
  std::map<std::string, double> ratios;
  for (const auto& [name, value] : result.concentrations) {
    if (name == reference) continue;
    ratios[name + "/" + reference] = value / denominator;
  }
  return ratios;
}

}  // namespace mrsquant
