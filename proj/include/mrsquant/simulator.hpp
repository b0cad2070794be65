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

// Labeled synthetic spectra: randomized concentrations and linewidths plus a
// macromolecular baseline, lipid resonances and SNR-controlled noise.

#ifndef MRSQUANT_SIMULATOR_HPP_
#define MRSQUANT_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrsquant/basis.hpp"
#include "mrsquant/random.hpp"
#include "mrsquant/signal.hpp"

namespace mrsquant {

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Range&) const = default;
};

struct SimulationConfig {
  std::size_t n_spectra = 1000;
  // Metabolites that are simulated. Ranges of every metabolite other than
  // `ratio_reference` are multiples of the sampled reference concentration
  // when `relative_to_reference` is set, so they are the ratio label ranges.
  std::map<std::string, Range> concentration_ranges{
      {"NAA", {0.5, 2.0}}, {"Cho", {0.1, 0.6}}, {"Cr", {0.5, 1.5}}};
  std::string ratio_reference = kCreatine;
  bool relative_to_reference = true;
  Range t2_scale_range{0.6, 1.4};
  Range snr_range{5.0, 50.0};
  // Peak heights as multiples of the tallest metabolite peak.
  Range baseline_amplitude_range{0.0, 0.5};
  Range lipid_amplitude_range{0.0, 1.0};
  bool enable_noise = true;
  std::uint64_t rng_seed = 0;
  BasisSet basis = default_brain_basis();

  // Throws ArgumentError naming the field.
  void validate() const;
  // Ratio targets ("NAA/Cr", ...) in basis order.
  std::vector<std::string> target_names() const;
};

// Everything drawn for one spectrum.
struct SimulationRecord {
  ConcentrationMap concentrations;
  double t2_scale = 1.0;
  double snr = 0.0;
  double baseline_scale = 0.0;
  double lipid_scale = 0.0;

  bool operator==(const SimulationRecord&) const = default;
};

struct LabeledSpectrum {
  ComplexSpectrum spectrum;
  std::map<std::string, double> labels;
  SimulationRecord truth;
};

// A set of labeled spectra sharing one acquisition protocol. `config` is
// present when the set was simulated and reproduces it exactly.
struct Dataset {
  std::string name;
  AcquisitionParams params;
  double reference_ppm = kDefaultReferencePpm;
  std::vector<std::string> target_names;
  std::vector<LabeledSpectrum> records;
  std::optional<SimulationConfig> config;
  std::string fingerprint;

  std::size_t size() const { return records.size(); }
  std::vector<double> ppm_grid() const { return ppm_axis(params, reference_ppm); }
  // Label column of `target`; throws LookupError if any record lacks it.
  std::vector<double> labels(const std::string& target) const;
};

// Deterministic in (config.rng_seed, index).
SimulationRecord sample_parameters(const SimulationConfig& config,
                                   std::size_t index);

// Real-valued sum of 4-8 Gaussian bumps (FWHM 0.3-1.0 ppm, centres
// 0.5-4.3 ppm) scaled so the maximum equals `amplitude`.
ComplexSpectrum generate_baseline(double amplitude,
                                  const AcquisitionParams& params,
                                  double reference_ppm, Rng& rng);

// Lipid resonances at 1.3 and 0.9 ppm, T2 in [0.02, 0.05] s, scaled so the
// maximum magnitude equals `amplitude`.
ComplexSpectrum generate_lipids(double amplitude,
                                const AcquisitionParams& params,
                                double reference_ppm, Rng& rng);

// Adds circular complex Gaussian noise with sigma = max|values| / snr.
ComplexSpectrum add_noise(const ComplexSpectrum& spectrum, double snr, Rng& rng);

LabeledSpectrum simulate_spectrum(const SimulationConfig& config,
                                  std::size_t index);

// Same output for any thread count.
std::vector<LabeledSpectrum> simulate_dataset(const SimulationConfig& config,
                                              unsigned threads = 0);

}  // namespace mrsquant

#endif  // MRSQUANT_SIMULATOR_HPP_
