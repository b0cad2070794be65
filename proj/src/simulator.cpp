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

#include "mrsquant/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mrsquant/error.hpp"
#include "mrsquant/parallel.hpp"

namespace mrsquant {
namespace {

void check_range(const Range& r, const std::string& field, double lower_bound,
                 bool strict) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max)) {
    throw ArgumentError(field + ": bounds must be finite");
  }
  if (r.min > r.max) {
    throw ArgumentError(field + ": min " + std::to_string(r.min) + " > max " +
                        std::to_string(r.max));
  }
  if (strict ? !(r.min > lower_bound) : r.min < lower_bound) {
    throw ArgumentError(field + ": min must be " + (strict ? ">" : ">=") + " " +
                        std::to_string(lower_bound));
  }
}

double draw(Rng& rng, const Range& r) { return uniform(rng, r.min, r.max); }

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

}  // namespace

void SimulationConfig::validate() const {
  if (n_spectra < 1) throw ArgumentError("n_spectra must be >= 1");
  basis.validate();
  if (concentration_ranges.empty()) {
    throw ArgumentError("concentration_ranges must not be empty");
  }
  for (const auto& [name, range] : concentration_ranges) {
    if (!basis.contains(name)) {
      throw ArgumentError("concentration_ranges." + name +
                          ": metabolite not in basis");
    }
    check_range(range, "concentration_ranges." + name, 0.0, false);
  }
  auto ref = concentration_ranges.find(ratio_reference);
  if (ref == concentration_ranges.end()) {
    throw ArgumentError("concentration_ranges must contain the ratio reference '" +
                        ratio_reference + "'");
  }
  if (!(ref->second.min > 0.0)) {
    throw ArgumentError("concentration_ranges." + ratio_reference +
                        ": min must be > 0");
  }
  check_range(t2_scale_range, "t2_scale_range", 0.0, true);
  check_range(snr_range, "snr_range", 0.0, true);
  check_range(baseline_amplitude_range, "baseline_amplitude_range", 0.0, false);
  check_range(lipid_amplitude_range, "lipid_amplitude_range", 0.0, false);
}

std::vector<std::string> SimulationConfig::target_names() const {
  std::vector<std::string> out;
  for (const auto& m : basis.metabolites) {
    if (m.name != ratio_reference && concentration_ranges.contains(m.name)) {
      out.push_back(m.name + "/" + ratio_reference);
    }
  }
  return out;
}

std::vector<double> Dataset::labels(const std::string& target) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto it = records[i].labels.find(target);
    if (it == records[i].labels.end()) {
      throw LookupError("record " + std::to_string(i) + " of dataset '" + name +
                        "' has no label '" + target + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

SimulationRecord sample_parameters(const SimulationConfig& config,
                                   std::size_t index) {
  if (index >= config.n_spectra) {
    throw ArgumentError("sample index " + std::to_string(index) +
                        " out of range [0, " + std::to_string(config.n_spectra) +
                        ")");
  }
  Rng rng = derive_stream(config.rng_seed, StreamTag::kParameters, index);
  SimulationRecord rec;
  const double reference =
      draw(rng, config.concentration_ranges.at(config.ratio_reference));
  rec.concentrations[config.ratio_reference] = reference;
  // Map order is alphabetical, so the draw sequence is fixed.
  for (const auto& [name, range] : config.concentration_ranges) {
    if (name == config.ratio_reference) continue;
    const double v = draw(rng, range);
    rec.concentrations[name] = config.relative_to_reference ? v * reference : v;
  }
  rec.t2_scale = draw(rng, config.t2_scale_range);
  rec.snr = draw(rng, config.snr_range);
  rec.baseline_scale = draw(rng, config.baseline_amplitude_range);
  rec.lipid_scale = draw(rng, config.lipid_amplitude_range);
  return rec;
}

ComplexSpectrum generate_baseline(double amplitude,
                                  const AcquisitionParams& params,
                                  double reference_ppm, Rng& rng) {
  if (!(amplitude >= 0.0)) throw ArgumentError("baseline amplitude must be >= 0");
  ComplexSpectrum out = zero_spectrum(params, reference_ppm);
  const auto n_bumps = 4 + uniform_index(rng, 5);
  std::vector<double> shape(out.size(), 0.0);
  for (std::uint64_t b = 0; b < n_bumps; ++b) {
    const double centre = uniform(rng, 0.5, 4.3);
    const double sigma = uniform(rng, 0.3, 1.0) * kFwhmToSigma;
    const double height = uniform(rng, 0.3, 1.0);
    for (std::size_t j = 0; j < shape.size(); ++j) {
      const double z = (out.ppm[j] - centre) / sigma;
      shape[j] += height * std::exp(-0.5 * z * z);
    }
  }
  double peak = 0.0;
  for (double v : shape) peak = std::max(peak, std::abs(v));
  for (std::size_t j = 0; j < shape.size(); ++j) {
    out.values[j] = Complex(amplitude * shape[j] / peak, 0.0);
  }
  return out;
}

ComplexSpectrum generate_lipids(double amplitude,
                                const AcquisitionParams& params,
                                double reference_ppm, Rng& rng) {
  if (!(amplitude >= 0.0)) throw ArgumentError("lipid amplitude must be >= 0");
  const LorentzianComponent methylene{1.3, 1.0, uniform(rng, 0.02, 0.05), 0.0};
  const LorentzianComponent methyl{0.9, uniform(rng, 0.3, 0.7),
                                   uniform(rng, 0.02, 0.05), 0.0};
  const LorentzianComponent lines[] = {methylene, methyl};
  ComplexSpectrum out =
      fid_to_spectrum(synthesize_fid(lines, params, reference_ppm), reference_ppm);
  const double scale = amplitude / out.max_magnitude();
  for (auto& v : out.values) v *= scale;
  return out;
}

ComplexSpectrum add_noise(const ComplexSpectrum& spectrum, double snr,
                          Rng& rng) {
  if (!(snr > 0.0)) throw ArgumentError("snr must be > 0");
  const double peak = spectrum.max_magnitude();
  if (peak == 0.0) {
    throw PreconditionError("SNR is undefined for an all-zero spectrum");
  }
  const double sigma = peak / snr;
  ComplexSpectrum out = spectrum;
  for (auto& v : out.values) v += circular_gaussian(rng, sigma);
  return out;
}

LabeledSpectrum simulate_spectrum(const SimulationConfig& config,
                                  std::size_t index) {
  LabeledSpectrum out;
  out.truth = sample_parameters(config, index);
  const auto& basis = config.basis;
  out.spectrum =
      linear_combination(basis, out.truth.concentrations, out.truth.t2_scale);
  const double tallest = out.spectrum.max_magnitude();
  if (out.truth.baseline_scale > 0.0) {
    Rng rng = derive_stream(config.rng_seed, StreamTag::kBaseline, index);
    out.spectrum = add(out.spectrum,
                       generate_baseline(out.truth.baseline_scale * tallest,
                                         basis.params, basis.reference_ppm, rng));
  }
  if (out.truth.lipid_scale > 0.0) {
    Rng rng = derive_stream(config.rng_seed, StreamTag::kLipids, index);
    out.spectrum = add(out.spectrum,
                       generate_lipids(out.truth.lipid_scale * tallest,
                                       basis.params, basis.reference_ppm, rng));
  }
  if (config.enable_noise) {
    Rng rng = derive_stream(config.rng_seed, StreamTag::kNoise, index);
    out.spectrum = add_noise(out.spectrum, out.truth.snr, rng);
  }
  const double reference = out.truth.concentrations.at(config.ratio_reference);
  for (const auto& [name, value] : out.truth.concentrations) {
    if (name == config.ratio_reference) continue;
    out.labels[name + "/" + config.ratio_reference] = value / reference;
  }
  return out;
}

std::vector<LabeledSpectrum> simulate_dataset(const SimulationConfig& config,
                                              unsigned threads) {
  config.validate();
  std::vector<LabeledSpectrum> out(config.n_spectra);
  parallel_for(config.n_spectra, threads,
               [&](std::size_t i) { out[i] = simulate_spectrum(config, i); });
  return out;
}

}  // namespace mrsquant
