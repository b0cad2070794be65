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

// Metabolite basis sets: named lists of Lorentzian resonances that are scaled
// by concentration and rendered to spectra.

#ifndef MRSQUANT_BASIS_HPP_
#define MRSQUANT_BASIS_HPP_

#include <map>
#include <string>
#include <vector>

#include "mrsquant/signal.hpp"

namespace mrsquant {

inline constexpr char kCreatine[] = "Cr";

using ConcentrationMap = std::map<std::string, double>;

struct MetaboliteBasis {
  std::string name;
  // Resonances at unit concentration.
  std::vector<LorentzianComponent> components;

  bool operator==(const MetaboliteBasis&) const = default;
};

struct BasisSet {
  std::string name;
  std::vector<MetaboliteBasis> metabolites;
  double reference_ppm = kDefaultReferencePpm;
  AcquisitionParams params;

  // Unique nonempty names, at least one component each, valid params.
  void validate() const;

  bool contains(const std::string& metabolite) const;
  // Throws LookupError.
  const MetaboliteBasis& find(const std::string& metabolite) const;
  std::vector<std::string> names() const;

  // Same resonances, rendered under a different acquisition protocol.
  BasisSet with_params(const AcquisitionParams& other) const;

  bool operator==(const BasisSet&) const = default;
};

// Components of `metabolite` with amplitudes times `concentration` and T2
// times `t2_scale`.
std::vector<LorentzianComponent> scaled_components(
    const MetaboliteBasis& metabolite, double concentration, double t2_scale);

ComplexSpectrum render_metabolite(const BasisSet& basis, const std::string& name,
                                  double concentration, double t2_scale = 1.0);

ComplexSpectrum linear_combination(const BasisSet& basis,
                                   const ConcentrationMap& concentrations,
                                   double t2_scale = 1.0);

// Five-metabolite stand-in brain basis (NAA, Cr, Cho, mI, Glx) built from
// literature chemical shifts. Unit concentration gives unit total amplitude
// for every metabolite.
BasisSet default_brain_basis(const AcquisitionParams& params = {},
                             double t2_s = 0.1);

}  // namespace mrsquant

#endif  // MRSQUANT_BASIS_HPP_
