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

#include "mrsquant/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "mrsquant/error.hpp"

namespace mrsquant {
namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void AcquisitionParams::validate() const {
  if (!finite(spectral_width_hz) || spectral_width_hz <= 0.0) {
    throw ArgumentError("acquisition.spectral_width_hz must be > 0");
  }
  if (n_points < 2) {
    throw ArgumentError("acquisition.n_points must be >= 2");
  }
  if (n_points % 2 != 0) {
    throw ArgumentError("acquisition.n_points must be even");
  }
  if (!finite(transmitter_freq_mhz) || transmitter_freq_mhz <= 0.0) {
    throw ArgumentError("acquisition.transmitter_freq_mhz must be > 0");
  }
}

void LorentzianComponent::validate() const {
  if (!finite(shift_ppm)) throw ArgumentError("component shift_ppm not finite");
  if (!finite(amplitude) || amplitude < 0.0) {
    throw ArgumentError("component amplitude must be >= 0");
  }
  if (!(t2_s > 0.0)) throw ArgumentError("component t2_s must be > 0");
  if (!finite(phase0_rad)) throw ArgumentError("component phase0 not finite");
}

double ComplexSpectrum::max_magnitude() const {
  return mrsquant::max_magnitude(values);
}

double max_magnitude(std::span<const Complex> values) {
  double best = 0.0;
  for (const Complex& v : values) best = std::max(best, std::abs(v));
  return best;
}

std::size_t nearest_bin(std::span<const double> axis, double ppm) {
  if (axis.empty()) throw ArgumentError("nearest_bin on empty axis");
  std::size_t best = 0;
  double best_dist = std::abs(axis[0] - ppm);
  for (std::size_t j = 1; j < axis.size(); ++j) {
    const double d = std::abs(axis[j] - ppm);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

std::vector<double> ppm_axis(const AcquisitionParams& params,
                             double reference_ppm) {
  params.validate();
  const double n = static_cast<double>(params.n_points);
  const double sw = params.spectral_width_hz;
  std::vector<double> axis(params.n_points);
  for (std::size_t j = 0; j < params.n_points; ++j) {
    axis[j] = reference_ppm +
              (sw / 2.0 - static_cast<double>(j) * sw / n) /
                  params.transmitter_freq_mhz;
  }
  return axis;
}

TimeSignal synthesize_fid(std::span<const LorentzianComponent> components,
                          const AcquisitionParams& params,
                          double reference_ppm) {
  params.validate();
  for (const auto& c : components) c.validate();

  TimeSignal fid{std::vector<Complex>(params.n_points, Complex(0.0, 0.0)),
                 params};
  const double dt = params.dwell_time_s();
  for (const auto& c : components) {
    if (c.amplitude == 0.0) continue;
    const double omega = 2.0 * std::numbers::pi *
                         c.offset_hz(reference_ppm, params.transmitter_freq_mhz);
    for (std::size_t k = 0; k < params.n_points; ++k) {
      const double t = static_cast<double>(k) * dt;
      fid.samples[k] +=
          std::polar(c.amplitude * std::exp(-t / c.t2_s), omega * t + c.phase0_rad);
    }
  }
  return fid;
}

ComplexSpectrum fid_to_spectrum(const TimeSignal& fid, double reference_ppm) {
  fid.params.validate();
  const std::size_t n = fid.params.n_points;
  if (fid.samples.size() != n) {
    throw ArgumentError("time signal length " + std::to_string(fid.samples.size()) +
                        " != n_points " + std::to_string(n));
  }
  std::vector<Complex> bins;
  fft_engine().fwd(bins, fid.samples);

  ComplexSpectrum spectrum;
  spectrum.params = fid.params;
  spectrum.reference_ppm = reference_ppm;
  spectrum.ppm = ppm_axis(fid.params, reference_ppm);
  spectrum.values.resize(n);
  // Axis index j carries frequency (n/2 - j) * sw / n.
  for (std::size_t j = 0; j < n; ++j) {
    spectrum.values[j] = bins[(n / 2 + n - j) % n];
  }
  return spectrum;
}

TimeSignal spectrum_to_fid(const ComplexSpectrum& spectrum) {
  spectrum.params.validate();
  const std::size_t n = spectrum.params.n_points;
  if (spectrum.values.size() != n) {
    throw ArgumentError("spectrum_to_fid needs a full spectrum of " +
                        std::to_string(n) + " bins, got " +
                        std::to_string(spectrum.values.size()));
  }
  std::vector<Complex> bins(n);
  for (std::size_t m = 0; m < n; ++m) {
    bins[m] = spectrum.values[(n / 2 + n - m) % n];
  }
  TimeSignal fid;
  fid.params = spectrum.params;
  fft_engine().inv(fid.samples, bins);
  return fid;
}

ComplexSpectrum add(const ComplexSpectrum& a, const ComplexSpectrum& b) {
  if (a.values.size() != b.values.size() || a.ppm != b.ppm) {
    throw CompatibilityError("cannot add spectra on different axes");
  }
  ComplexSpectrum out = a;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += b.values[j];
  return out;
}

ComplexSpectrum zero_spectrum(const AcquisitionParams& params,
                              double reference_ppm) {
  ComplexSpectrum s;
  s.params = params;
  s.reference_ppm = reference_ppm;
  s.ppm = ppm_axis(params, reference_ppm);
  s.values.assign(params.n_points, Complex(0.0, 0.0));
  return s;
}

}  // namespace mrsquant
