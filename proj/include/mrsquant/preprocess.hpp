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

// Maps spectra onto a model's feature grid: ppm crop, linear resampling and
// amplitude normalization against a reference training spectrum.

#ifndef MRSQUANT_PREPROCESS_HPP_
#define MRSQUANT_PREPROCESS_HPP_

#include <span>
#include <string>
#include <vector>

#include "mrsquant/signal.hpp"

namespace mrsquant {

inline constexpr double kDefaultCropHighPpm = 4.3;
inline constexpr double kDefaultCropLowPpm = 0.2;

struct FeatureVector {
  std::vector<double> values;
  std::vector<double> ppm_grid;
};

// Keeps the bins with lo <= ppm <= hi. Throws RangeError on empty overlap.
ComplexSpectrum crop_ppm(const ComplexSpectrum& spectrum, double hi, double lo);

// Pads the FID of a full spectrum with zeros to `n_points` and transforms
// back: Fourier interpolation onto a finer axis with the same spectral width.
ComplexSpectrum zero_fill(const ComplexSpectrum& spectrum, std::size_t n_points);

// Linear interpolation of real and imaginary parts onto `target_grid`.
// Throws RangeError if a grid point lies outside the spectrum's axis.
std::vector<Complex> resample(const ComplexSpectrum& spectrum,
                              std::span<const double> target_grid);

// Scales `values` so its maximum magnitude equals `reference_max_magnitude`.
// Throws PreconditionError for an all-zero input.
std::vector<Complex> normalize_to_reference(std::span<const Complex> values,
                                            double reference_max_magnitude);
std::vector<Complex> normalize_to_reference(std::span<const Complex> values,
                                            std::span<const Complex> reference);

// The model input: real (absorption) part on the grid.
FeatureVector real_features(std::span<const Complex> values,
                            std::span<const double> grid);

// Everything needed to turn any spectrum into model features. Learned from a
// training set and persisted with the model.
struct FeaturePipeline {
  double crop_high_ppm = kDefaultCropHighPpm;
  double crop_low_ppm = kDefaultCropLowPpm;
  std::vector<double> grid;
  double reference_max_magnitude = 1.0;
  // Index of the training spectrum used as the normalization reference.
  std::size_t reference_index = 0;
  std::string representation = "real";
  // Zero-fill full spectra whose bins are wider than the grid's before
  // resampling.
  bool zero_fill = true;

  // Grid from the cropped training axis; reference is the training spectrum
  // with the median cropped max magnitude. All spectra must share one axis.
  static FeaturePipeline fit(std::span<const ComplexSpectrum> training,
                             double crop_high_ppm = kDefaultCropHighPpm,
                             double crop_low_ppm = kDefaultCropLowPpm);

  // True when cropping alone lands `spectrum` on the grid.
  bool matches_grid(const ComplexSpectrum& spectrum) const;

  // Crop, resample (only if `allow_resample`; otherwise a grid mismatch
  // throws CompatibilityError) and normalize. Coarser full spectra are
  // zero-filled to the grid's resolution first.
  FeatureVector apply(const ComplexSpectrum& spectrum,
                      bool allow_resample = false) const;

  std::size_t n_features() const { return grid.size(); }
};

}  // namespace mrsquant

#endif  // MRSQUANT_PREPROCESS_HPP_
