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

#include "mrsquant/basis.hpp"

#include <cmath>
#include <set>

#include "mrsquant/error.hpp"

namespace mrsquant {

void BasisSet::validate() const {
  params.validate();
  if (!std::isfinite(reference_ppm)) {
    throw ArgumentError("basis.reference_ppm not finite");
  }
  std::set<std::string> seen;
  for (const auto& m : metabolites) {
    if (m.name.empty()) throw ArgumentError("basis metabolite with empty name");
    if (!seen.insert(m.name).second) {
      throw ArgumentError("duplicate basis metabolite '" + m.name + "'");
    }
    if (m.components.empty()) {
      throw ArgumentError("basis metabolite '" + m.name + "' has no components");
    }
    for (const auto& c : m.components) c.validate();
  }
}

bool BasisSet::contains(const std::string& metabolite) const {
  for (const auto& m : metabolites) {
    if (m.name == metabolite) return true;
  }
  return false;
}

const MetaboliteBasis& BasisSet::find(const std::string& metabolite) const {
  for (const auto& m : metabolites) {
    if (m.name == metabolite) return m;
  }
  throw LookupError("unknown metabolite '" + metabolite + "' in basis '" +
                    name + "'");
}

std::vector<std::string> BasisSet::names() const {
  std::vector<std::string> out;
  out.reserve(metabolites.size());
  for (const auto& m : metabolites) out.push_back(m.name);
  return out;
}

BasisSet BasisSet::with_params(const AcquisitionParams& other) const {
  BasisSet copy = *this;
  copy.params = other;
  return copy;
}

std::vector<LorentzianComponent> scaled_components(
    const MetaboliteBasis& metabolite, double concentration, double t2_scale) {
  if (!std::isfinite(concentration) || concentration < 0.0) {
    throw ArgumentError("concentration of '" + metabolite.name +
                        "' must be >= 0");
  }
  if (!(t2_scale > 0.0)) throw ArgumentError("t2_scale must be > 0");
  std::vector<LorentzianComponent> out = metabolite.components;
  for (auto& c : out) {
    c.amplitude *= concentration;
    c.t2_s *= t2_scale;
  }
  return out;
}

ComplexSpectrum render_metabolite(const BasisSet& basis, const std::string& name,
                                  double concentration, double t2_scale) {
  const auto components =
      scaled_components(basis.find(name), concentration, t2_scale);
  return fid_to_spectrum(
      synthesize_fid(components, basis.params, basis.reference_ppm),
      basis.reference_ppm);
}

ComplexSpectrum linear_combination(const BasisSet& basis,
                                   const ConcentrationMap& concentrations,
                                   double t2_scale) {
  // One transform of the pooled components; equal to the sum of the rendered
  // metabolites by linearity.
  std::vector<LorentzianComponent> pooled;
  for (const auto& [name, value] : concentrations) {
    const auto part = scaled_components(basis.find(name), value, t2_scale);
    pooled.insert(pooled.end(), part.begin(), part.end());
  }
  return fid_to_spectrum(
      synthesize_fid(pooled, basis.params, basis.reference_ppm),
      basis.reference_ppm);
}

BasisSet default_brain_basis(const AcquisitionParams& params, double t2_s) {
  params.validate();
  auto lines = [t2_s](std::initializer_list<std::pair<double, double>> shifts) {
    std::vector<LorentzianComponent> out;
    for (const auto& [ppm, amplitude] : shifts) {
      out.push_back({ppm, amplitude, t2_s, 0.0});
    }
    return out;
  };
  BasisSet basis;
  basis.name = "default-brain";
  basis.params = params;
  basis.reference_ppm = kDefaultReferencePpm;
  basis.metabolites = {
      {"NAA", lines({{2.01, 0.8}, {2.49, 0.1}, {2.67, 0.1}})},
      {"Cr", lines({{3.03, 0.6}, {3.91, 0.4}})},
      {"Cho", lines({{3.19, 1.0}})},
      {"mI", lines({{3.52, 0.3}, {3.55, 0.2}, {3.58, 0.2}, {3.61, 0.3}})},
      {"Glx",
       lines({{2.05, 0.15}, {2.12, 0.15}, {2.35, 0.2}, {2.45, 0.2}, {3.75, 0.3}})},
  };
  return basis;
}

}  // namespace mrsquant
