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

// Linear least-squares basis fit: the real part of a spectrum over a ppm
// window modeled as a linear combination of rendered basis spectra plus a
// polynomial baseline. Used as the reference quantifier in evaluations.

#ifndef MRSQUANT_LINEAR_FIT_HPP_
#define MRSQUANT_LINEAR_FIT_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrsquant/basis.hpp"
#include "mrsquant/preprocess.hpp"
#include "mrsquant/signal.hpp"

namespace mrsquant {

struct OracleConfig {
  int baseline_degree = 4;
  double crop_high_ppm = kDefaultCropHighPpm;
  double crop_low_ppm = kDefaultCropLowPpm;

  void validate() const;
  bool operator==(const OracleConfig&) const = default;
};

struct FitResult {
  std::map<std::string, double> concentrations;
  // Coefficients of 1, x, x^2, ... with x the window ppm mapped to [-1, 1].
  std::vector<double> baseline_coeffs;
  double residual_norm = 0.0;
  bool rank_deficient = false;
  std::vector<double> residual;
};

// Holds the factorized design matrix for one basis and acquisition protocol,
// so many spectra can be fitted cheaply.
class LinearFitOracle {
 public:
  LinearFitOracle(const BasisSet& basis, const AcquisitionParams& params,
                  double reference_ppm, const OracleConfig& config = {});

  // Throws CompatibilityError unless `spectrum` covers the fit window on the
  // oracle's axis.
  FitResult fit(const ComplexSpectrum& spectrum) const;

  const Eigen::MatrixXd& design() const { return design_; }
  const std::vector<double>& window_ppm() const { return window_ppm_; }

 private:
  std::vector<std::string> names_;
  OracleConfig config_;
  std::vector<double> window_ppm_;
  Eigen::MatrixXd design_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver_;
};

// One-shot fit with the basis rendered on the spectrum's own protocol.
FitResult lsq_fit(const ComplexSpectrum& spectrum, const BasisSet& basis,
                  int baseline_degree = 4);

// Metabolite coefficients divided by the reference coefficient, keyed
// "<name>/<reference>". Throws NumericalError when the reference is <= 0.
std::map<std::string, double> fit_ratios(const FitResult& result,
                                         const std::string& reference = kCreatine);

}  // namespace mrsquant

#endif  // MRSQUANT_LINEAR_FIT_HPP_
