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

// Training helpers and the four experiment designs: train on one dataset,
// quantify another, and compare forest and oracle estimates against the
// truth of the test set.

#ifndef MRSQUANT_EXPERIMENT_HPP_
#define MRSQUANT_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrsquant/basis.hpp"
#include "mrsquant/forest.hpp"
#include "mrsquant/linear_fit.hpp"
#include "mrsquant/metrics.hpp"
#include "mrsquant/simulator.hpp"

namespace mrsquant {

enum class ExperimentKind {
  kSyntheticToSynthetic,
  kRealToRealSpectra,       // k-fold cross-validation on one dataset
  kRealSpectraToRealImages,
  kSyntheticToRealImages,
};

std::string experiment_name(ExperimentKind kind);
// Throws LookupError listing the valid names.
ExperimentKind parse_experiment(const std::string& name);
std::vector<std::string> experiment_names();

// Where reference values come from.
enum class TruthSource {
  kSimulation,  // dataset labels
  kOracle,      // linear-fit ratios, the stand-in for fitted in-vivo data
};
std::string truth_source_name(TruthSource source);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSyntheticToSynthetic;
  ForestConfig forest;
  OracleConfig oracle;
  // Required whenever train and test protocols differ.
  bool preprocess = false;
  std::size_t folds = 10;
  std::uint64_t fold_seed = 0;
  // Empty means every target the training truth provides.
  std::vector<std::string> targets;
};

// Reference values of one dataset. Rows whose oracle fit failed are absent
// from `rows`.
struct TruthTable {
  TruthSource source = TruthSource::kSimulation;
  std::vector<std::string> targets;
  std::vector<std::size_t> rows;
  std::vector<std::vector<double>> columns;  // per target, parallel to rows
  std::size_t failures = 0;
};

TruthTable truth_table(const Dataset& dataset, TruthSource source,
                       const std::vector<std::string>& targets,
                       const BasisSet& basis, const OracleConfig& oracle,
                       unsigned threads = 0);

// Fits the feature pipeline on `spectra` and a forest on the resulting
// features.
RandomForestModel train_forest(std::span<const ComplexSpectrum> spectra,
                               const std::vector<std::vector<double>>& Y,
                               const std::vector<std::string>& targets,
                               const ForestConfig& config, unsigned threads = 0);

// Trains on every record of a labeled dataset.
RandomForestModel train_forest(const Dataset& dataset, const ForestConfig& config,
                               unsigned threads = 0);

struct MethodSummary {
  BoxplotStats errors;
  // NaN when undefined (constant estimates).
  double pearson_r = 0.0;
};

struct TargetReport {
  std::string target;
  std::vector<std::size_t> samples;  // test-set record indices
  std::vector<double> truths;
  std::vector<double> forest_estimates;
  std::vector<double> forest_errors;
  // Empty when the oracle is the truth. NaN marks a failed oracle fit.
  std::vector<double> oracle_estimates;
  std::vector<double> oracle_errors;
  MethodSummary forest;
  std::optional<MethodSummary> oracle;
  std::size_t oracle_failures = 0;
};

struct SubsetReport {
  std::string name;
  std::string selection;
  std::vector<std::size_t> positions;  // indices into TargetReport::samples
  // Per target, parallel to EvalReport::targets.
  std::vector<double> forest_median;
  std::vector<double> oracle_median;
};

struct FoldReport {
  std::size_t fold = 0;
  std::vector<std::size_t> positions;  // indices into TargetReport::samples
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<double> forest_median;  // per target
};

struct EvalReport {
  std::string experiment;
  std::string truth_source;
  std::string comparison = "oracle";
  ExperimentSpec spec;
  std::string train_fingerprint;
  std::string test_fingerprint;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t truth_failures = 0;
  std::vector<TargetReport> targets;
  std::vector<SubsetReport> subsets;
  std::vector<FoldReport> folds;

  const TargetReport& target(const std::string& name) const;
};

// Recomputes every summary statistic from the per-sample vectors.
void summarize(EvalReport& report);

struct ExperimentResult {
  EvalReport report;
  // The last model trained (the final fold for cross-validation).
  RandomForestModel model;
};

// `test` is ignored for k-fold. A pretrained model skips training for the
// non-k-fold designs. Throws ArgumentError when protocols differ and
// spec.preprocess is off.
ExperimentResult run_experiment(const ExperimentSpec& spec, const Dataset& train,
                                const Dataset* test, const BasisSet& basis,
                                const RandomForestModel* pretrained = nullptr,
                                unsigned threads = 0);

}  // namespace mrsquant

#endif  // MRSQUANT_EXPERIMENT_HPP_
