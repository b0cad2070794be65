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

// Discrete signal model: Lorentzian components summed into a free induction
// decay, and the transform between time and ppm-indexed frequency domain.

#ifndef MRSQUANT_SIGNAL_HPP_
#define MRSQUANT_SIGNAL_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mrsquant {

using Complex = std::complex<double>;

// Water resonance; the default centre of every ppm axis.
inline constexpr double kDefaultReferencePpm = 4.7;

struct AcquisitionParams {
  double spectral_width_hz = 2500.0;
  std::size_t n_points = 1024;
  // Proton frequency at 3 T.
  double transmitter_freq_mhz = 127.7;
  // Metadata only.
  double echo_time_ms = 35.0;
  double repetition_time_ms = 2000.0;

  // Throws ArgumentError naming the offending field. n_points must be even
  // so that the reference sits exactly on a frequency bin.
  void validate() const;

  double dwell_time_s() const { return 1.0 / spectral_width_hz; }
  double duration_s() const {
    return static_cast<double>(n_points) / spectral_width_hz;
  }
  double bin_width_hz() const {
    return spectral_width_hz / static_cast<double>(n_points);
  }
  double bin_width_ppm() const { return bin_width_hz() / transmitter_freq_mhz; }
  double span_ppm() const { return spectral_width_hz / transmitter_freq_mhz; }

  bool operator==(const AcquisitionParams&) const = default;
};

struct LorentzianComponent {
  double shift_ppm = 0.0;
  double amplitude = 0.0;
  // T2* decay constant in seconds. Values >= 1e9 behave as no decay.
  double t2_s = 0.1;
  double phase0_rad = 0.0;

  void validate() const;
  double offset_hz(double reference_ppm, double transmitter_freq_mhz) const {
    return (shift_ppm - reference_ppm) * transmitter_freq_mhz;
  }

  bool operator==(const LorentzianComponent&) const = default;
};

struct TimeSignal {
  std::vector<Complex> samples;
  AcquisitionParams params;
};

// Frequency-domain signal. Index 0 is the most downfield bin; `ppm` is
// strictly decreasing. After cropping, `values` covers only part of the
// acquisition's full axis.
struct ComplexSpectrum {
  std::vector<Complex> values;
  std::vector<double> ppm;
  AcquisitionParams params;
  double reference_ppm = kDefaultReferencePpm;

  std::size_t size() const { return values.size(); }
  bool is_full() const { return values.size() == params.n_points; }
  double max_magnitude() const;
};

std::vector<double> ppm_axis(const AcquisitionParams& params,
                             double reference_ppm = kDefaultReferencePpm);

// samples[k] = sum_c a_c exp(i(2 pi f_c t_k + phi_c)) exp(-t_k / T2_c).
TimeSignal synthesize_fid(std::span<const LorentzianComponent> components,
                          const AcquisitionParams& params,
                          double reference_ppm = kDefaultReferencePpm);

ComplexSpectrum fid_to_spectrum(const TimeSignal& fid,
                                double reference_ppm = kDefaultReferencePpm);

// Requires a full (uncropped) spectrum.
TimeSignal spectrum_to_fid(const ComplexSpectrum& spectrum);

double max_magnitude(std::span<const Complex> values);

// Index of the axis entry closest to `ppm`.
std::size_t nearest_bin(std::span<const double> axis, double ppm);

// Elementwise a + b. Both spectra must share an axis.
ComplexSpectrum add(const ComplexSpectrum& a, const ComplexSpectrum& b);

ComplexSpectrum zero_spectrum(const AcquisitionParams& params,
                              double reference_ppm = kDefaultReferencePpm);

}  // namespace mrsquant

#endif  // MRSQUANT_SIGNAL_HPP_
