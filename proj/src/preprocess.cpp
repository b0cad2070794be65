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

#include "mrsquant/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "mrsquant/error.hpp"

namespace mrsquant {

ComplexSpectrum crop_ppm(const ComplexSpectrum& spectrum, double hi, double lo) {
  if (!(hi > lo)) {
    throw ArgumentError("crop bounds need hi > lo, got hi=" + std::to_string(hi) +
                        " lo=" + std::to_string(lo));
  }
  ComplexSpectrum out;
  out.params = spectrum.params;
  out.reference_ppm = spectrum.reference_ppm;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const double p = spectrum.ppm[j];
    if (p >= lo && p <= hi) {
      out.ppm.push_back(p);
      out.values.push_back(spectrum.values[j]);
    }
  }
  if (out.values.empty()) {
    throw RangeError("crop window [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "] ppm does not overlap the axis");
  }
  return out;
}

ComplexSpectrum zero_fill(const ComplexSpectrum& spectrum, std::size_t n_points) {
  if (!spectrum.is_full()) throw ArgumentError("zero_fill needs a full spectrum");
  if (n_points < spectrum.size() || n_points % 2 != 0) {
    throw ArgumentError("zero_fill target " + std::to_string(n_points) +
                        " must be even and >= " + std::to_string(spectrum.size()));
  }
  TimeSignal fid = spectrum_to_fid(spectrum);
  fid.samples.resize(n_points, Complex(0.0, 0.0));
  fid.params.n_points = n_points;
  return fid_to_spectrum(fid, spectrum.reference_ppm);
}

std::vector<Complex> resample(const ComplexSpectrum& spectrum,
                              std::span<const double> target_grid) {
  const auto& axis = spectrum.ppm;
  if (axis.size() < 2) throw RangeError("resample needs at least two source bins");
  const double top = axis.front();
  const double bottom = axis.back();
  std::vector<Complex> out;
  out.reserve(target_grid.size());
  for (double t : target_grid) {
    if (!(t <= top && t >= bottom)) {
      throw RangeError("grid point " + std::to_string(t) +
                       " ppm outside source span [" + std::to_string(bottom) +
                       ", " + std::to_string(top) + "]");
    }
    // First index whose ppm is <= t on the decreasing axis.
    auto it = std::lower_bound(axis.begin(), axis.end(), t, std::greater<>());
    std::size_t j = static_cast<std::size_t>(it - axis.begin());
    if (j < axis.size() && axis[j] == t) {
      out.push_back(spectrum.values[j]);
      continue;
    }
    const std::size_t upper = j - 1;  // axis[upper] > t > axis[j]
    const double w = (axis[upper] - t) / (axis[upper] - axis[j]);
    const Complex a = spectrum.values[upper];
    const Complex b = spectrum.values[j];
    out.emplace_back(a.real() + w * (b.real() - a.real()),
                     a.imag() + w * (b.imag() - a.imag()));
  }
  return out;
}

std::vector<Complex> normalize_to_reference(std::span<const Complex> values,
                                            double reference_max_magnitude) {
  const double peak = max_magnitude(values);
  if (peak == 0.0) {
    throw PreconditionError("cannot normalize an all-zero spectrum");
  }
  const double scale = reference_max_magnitude / peak;
  std::vector<Complex> out(values.begin(), values.end());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<Complex> normalize_to_reference(std::span<const Complex> values,
                                            std::span<const Complex> reference) {
  return normalize_to_reference(values, max_magnitude(reference));
}

FeatureVector real_features(std::span<const Complex> values,
                            std::span<const double> grid) {
  FeatureVector fv;
  fv.values.reserve(values.size());
  for (const auto& v : values) fv.values.push_back(v.real());
  fv.ppm_grid.assign(grid.begin(), grid.end());
  return fv;
}

FeaturePipeline FeaturePipeline::fit(std::span<const ComplexSpectrum> training,
                                     double crop_high_ppm, double crop_low_ppm) {
  if (training.empty()) throw ArgumentError("feature pipeline needs training spectra");
  FeaturePipeline p;
  p.crop_high_ppm = crop_high_ppm;
  p.crop_low_ppm = crop_low_ppm;
  p.grid = crop_ppm(training.front(), crop_high_ppm, crop_low_ppm).ppm;

  std::vector<double> peaks(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    if (training[i].ppm != training.front().ppm) {
      throw CompatibilityError("training spectrum " + std::to_string(i) +
                               " is on a different ppm axis");
    }
    peaks[i] = max_magnitude(crop_ppm(training[i], crop_high_ppm, crop_low_ppm).values);
  }
  std::vector<std::size_t> order(training.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return peaks[a] != peaks[b] ? peaks[a] < peaks[b] : a < b;
  });
  p.reference_index = order[(order.size() - 1) / 2];
  p.reference_max_magnitude = peaks[p.reference_index];
  if (p.reference_max_magnitude == 0.0) {
    throw PreconditionError("median training spectrum is all zero");
  }
  return p;
}

bool FeaturePipeline::matches_grid(const ComplexSpectrum& spectrum) const {
  std::size_t n = 0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const double ppm = spectrum.ppm[j];
    if (ppm >= crop_low_ppm && ppm <= crop_high_ppm) {
      if (n >= grid.size() || grid[n] != ppm) return false;
      ++n;
    }
  }
  return n == grid.size();
}

FeatureVector FeaturePipeline::apply(const ComplexSpectrum& spectrum,
                                     bool allow_resample) const {
  if (matches_grid(spectrum)) {
    const auto cropped = crop_ppm(spectrum, crop_high_ppm, crop_low_ppm);
    return real_features(
        normalize_to_reference(cropped.values, reference_max_magnitude), grid);
  }
  if (!allow_resample) {
    throw CompatibilityError(
        "spectrum axis does not match the model grid (" +
        std::to_string(spectrum.params.n_points) + " points, " +
        std::to_string(spectrum.params.spectral_width_hz) +
        " Hz); enable preprocessing to resample");
  }
  const ComplexSpectrum* source = &spectrum;
  ComplexSpectrum filled;
  if (zero_fill && spectrum.is_full() && grid.size() >= 2) {
    const double grid_step = grid[0] - grid[1];
    const double needed = spectrum.params.span_ppm() / grid_step;
    auto n = static_cast<std::size_t>(std::ceil(needed - 1e-9));
    n += n % 2;
    if (n > spectrum.size()) {
      filled = mrsquant::zero_fill(spectrum, n);
      source = &filled;
    }
  }
  // Keep one extra source bin on each side so every grid point is bracketed.
  const double margin = source->params.bin_width_ppm();
  const auto cropped =
      crop_ppm(*source, crop_high_ppm + margin, crop_low_ppm - margin);
  return real_features(
      normalize_to_reference(resample(cropped, grid), reference_max_magnitude),
      grid);
}

}  // namespace mrsquant
