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

#include "mrsquant/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrsquant/error.hpp"
#include "mrsquant/parallel.hpp"

namespace mrsquant {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NamedKind {
  ExperimentKind kind;
  const char* name;
};
constexpr NamedKind kKinds[] = {
    {ExperimentKind::kSyntheticToSynthetic, "synthetic-synthetic"},
    {ExperimentKind::kRealToRealSpectra, "real-real-spectra"},
    {ExperimentKind::kRealSpectraToRealImages, "real-spectra-real-images"},
    {ExperimentKind::kSyntheticToRealImages, "synthetic-real-images"},
};

std::vector<double> finite_only(std::span<const double> values) {
  std::vector<double> out;
  for (double v : values) {
    if (std::isfinite(v)) out.push_back(v);
  }
  return out;
}

double error_or_nan(double estimate, double truth) {
  if (!std::isfinite(estimate) || truth == 0.0) return kNaN;
  return relative_error(estimate, truth);
}

double median_or_nan(std::span<const double> values) {
  const auto kept = finite_only(values);
  return kept.empty() ? kNaN : boxplot_stats(kept).median;
}

MethodSummary summarize_method(std::span<const double> estimates,
                               std::span<const double> errors,
                               std::span<const double> truths) {
  MethodSummary s;
  const auto kept = finite_only(errors);
  if (!kept.empty()) {
    s.errors = boxplot_stats(kept);
  } else {
    s.errors = {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, 0};
  }
  std::vector<double> e, t;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (std::isfinite(estimates[i])) {
      e.push_back(estimates[i]);
      t.push_back(truths[i]);
    }
  }
  try {
    s.pearson_r = r_score(e, t);
  } catch (const Error&) {
    s.pearson_r = kNaN;
  }
  return s;
}

std::vector<ComplexSpectrum> spectra_of(const Dataset& dataset,
                                        std::span<const std::size_t> rows) {
  std::vector<ComplexSpectrum> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(dataset.records[r].spectrum);
  return out;
}

bool same_protocol(const Dataset& a, const Dataset& b) {
  return a.params == b.params && a.reference_ppm == b.reference_ppm;
}

// Target columns restricted to `positions` of a truth table.
std::vector<std::vector<double>> select_columns(
    const TruthTable& truth, std::span<const std::size_t> positions) {
  std::vector<std::vector<double>> out(truth.columns.size());
  for (std::size_t t = 0; t < truth.columns.size(); ++t) {
    out[t].reserve(positions.size());
    for (std::size_t p : positions) out[t].push_back(truth.columns[t][p]);
  }
  return out;
}

void add_artifact_subsets(EvalReport& report, const Dataset& test) {
  if (report.targets.empty()) return;
  const auto& samples = report.targets.front().samples;
  std::vector<double> baseline, lipid;
  for (std::size_t s : samples) {
    baseline.push_back(test.records[s].truth.baseline_scale);
    lipid.push_back(test.records[s].truth.lipid_scale);
  }
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto sb = sorted(baseline);
  const auto sl = sorted(lipid);
  if (sb.empty()) return;
  const double b_q1 = sorted_quantile(sb, 0.25), b_q3 = sorted_quantile(sb, 0.75);
  const double l_q1 = sorted_quantile(sl, 0.25), l_q3 = sorted_quantile(sl, 0.75);

  auto subset = [&](std::string name, std::string selection, auto&& keep) {
    SubsetReport s;
    s.name = std::move(name);
    s.selection = std::move(selection);
    for (std::size_t p = 0; p < samples.size(); ++p) {
      if (keep(p)) s.positions.push_back(p);
    }
    report.subsets.push_back(std::move(s));
  };
  subset("high_baseline", "baseline_scale >= upper quartile",
         [&](std::size_t p) { return baseline[p] >= b_q3; });
  subset("high_lipid", "lipid_scale >= upper quartile",
         [&](std::size_t p) { return lipid[p] >= l_q3; });
  subset("low_artifact",
         "baseline_scale <= lower quartile and lipid_scale <= lower quartile",
         [&](std::size_t p) { return baseline[p] <= b_q1 && lipid[p] <= l_q1; });
}

// Fills forest estimates for the given test rows into `report`.
void quantify(EvalReport& report, const RandomForestModel& model,
              const Dataset& test, const TruthTable& truth,
              std::span<const std::size_t> positions, bool allow_resample,
              unsigned threads) {
  std::vector<std::map<std::string, double>> predictions(positions.size());
  parallel_for(positions.size(), threads, [&](std::size_t k) {
    const auto& spectrum = test.records[truth.rows[positions[k]]].spectrum;
    predictions[k] = model.predict(model.pipeline.apply(spectrum, allow_resample));
  });
  for (std::size_t t = 0; t < report.targets.size(); ++t) {
    TargetReport& tr = report.targets[t];
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const double truth_value = truth.columns[t][positions[k]];
      const double estimate = predictions[k].at(tr.target);
      tr.samples.push_back(truth.rows[positions[k]]);
      tr.truths.push_back(truth_value);
      tr.forest_estimates.push_back(estimate);
      tr.forest_errors.push_back(error_or_nan(estimate, truth_value));
    }
  }
}

void compare_oracle(EvalReport& report, const Dataset& test,
                    const BasisSet& basis, const OracleConfig& config,
                    unsigned threads) {
  if (report.targets.empty()) return;
  const LinearFitOracle oracle(basis, test.params, test.reference_ppm, config);
  const auto& samples = report.targets.front().samples;
  std::vector<std::map<std::string, double>> ratios(samples.size());
  std::vector<char> failed(samples.size(), 0);
  parallel_for(samples.size(), threads, [&](std::size_t k) {
    try {
      ratios[k] = fit_ratios(oracle.fit(test.records[samples[k]].spectrum));
    } catch (const NumericalError&) {
      failed[k] = 1;
    }
  });
  for (auto& tr : report.targets) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double estimate = failed[k] ? kNaN : ratios[k].at(tr.target);
      tr.oracle_estimates.push_back(estimate);
      tr.oracle_errors.push_back(error_or_nan(estimate, tr.truths[k]));
    }
  }
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& k : kKinds) out.emplace_back(k.name);
  return out;
}

ExperimentKind parse_experiment(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  std::string valid;
  for (const auto& k : kKinds) valid += std::string(valid.empty() ? "" : ", ") + k.name;
  throw LookupError("unknown experiment '" + name + "'; valid names: " + valid);
}

std::string truth_source_name(TruthSource source) {
  return source == TruthSource::kSimulation ? "simulation" : "oracle";
}

const TargetReport& EvalReport::target(const std::string& name) const {
  for (const auto& t : targets) {
    if (t.target == name) return t;
  }
  throw LookupError("report has no target '" + name + "'");
}

TruthTable truth_table(const Dataset& dataset, TruthSource source,
                       const std::vector<std::string>& targets,
                       const BasisSet& basis, const OracleConfig& oracle_config,
                       unsigned threads) {
  TruthTable table;
  table.source = source;
  table.targets = targets.empty() ? dataset.target_names : targets;
  if (table.targets.empty()) {
    throw ArgumentError("dataset '" + dataset.name + "' names no targets");
  }
  const std::size_t n = dataset.size();
  if (source == TruthSource::kSimulation) {
    for (const auto& t : table.targets) table.columns.push_back(dataset.labels(t));
    table.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) table.rows[i] = i;
    return table;
  }

  const LinearFitOracle oracle(basis, dataset.params, dataset.reference_ppm,
                               oracle_config);
  std::vector<std::map<std::string, double>> ratios(n);
  std::vector<char> ok(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      ratios[i] = fit_ratios(oracle.fit(dataset.records[i].spectrum));
      ok[i] = 1;
    } catch (const NumericalError&) {
    }
  });
  for (const auto& t : table.targets) {
    if (n > 0 && ok[0] && !ratios[0].contains(t)) {
      throw LookupError("oracle provides no ratio '" + t + "'");
    }
  }
  table.columns.resize(table.targets.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      ++table.failures;
      continue;
    }
    table.rows.push_back(i);
    for (std::size_t t = 0; t < table.targets.size(); ++t) {
      const auto it = ratios[i].find(table.targets[t]);
      if (it == ratios[i].end()) {
        throw LookupError("oracle provides no ratio '" + table.targets[t] + "'");
      }
      table.columns[t].push_back(it->second);
    }
  }
  return table;
}

RandomForestModel train_forest(std::span<const ComplexSpectrum> spectra,
                               const std::vector<std::vector<double>>& Y,
                               const std::vector<std::string>& targets,
                               const ForestConfig& config, unsigned threads) {
  const FeaturePipeline pipeline = FeaturePipeline::fit(spectra);
  FeatureMatrix X(spectra.size(), pipeline.n_features());
  parallel_for(spectra.size(), threads, [&](std::size_t i) {
    const auto features = pipeline.apply(spectra[i]);
    for (std::size_t c = 0; c < features.values.size(); ++c) {
      X(i, c) = features.values[c];
    }
  });
  RandomForestModel model = fit_forest(X, Y, targets, config, threads);
  model.pipeline = pipeline;
  return model;
}

RandomForestModel train_forest(const Dataset& dataset, const ForestConfig& config,
                               unsigned threads) {
  if (dataset.target_names.empty()) {
    throw ArgumentError("dataset '" + dataset.name + "' has no targets to train on");
  }
  std::vector<std::vector<double>> Y;
  for (const auto& t : dataset.target_names) Y.push_back(dataset.labels(t));
  std::vector<ComplexSpectrum> spectra;
  spectra.reserve(dataset.size());
  for (const auto& r : dataset.records) spectra.push_back(r.spectrum);
  RandomForestModel model =
      train_forest(spectra, Y, dataset.target_names, config, threads);
  model.training_fingerprint = dataset.fingerprint;
  return model;
}

void summarize(EvalReport& report) {
  for (auto& tr : report.targets) {
    tr.forest = summarize_method(tr.forest_estimates, tr.forest_errors, tr.truths);
    tr.oracle.reset();
    tr.oracle_failures = 0;
    if (!tr.oracle_estimates.empty()) {
      tr.oracle = summarize_method(tr.oracle_estimates, tr.oracle_errors, tr.truths);
      for (double v : tr.oracle_estimates) {
        if (!std::isfinite(v)) ++tr.oracle_failures;
      }
    }
  }
  auto pick = [](std::span<const double> values,
                 std::span<const std::size_t> positions) {
    std::vector<double> out;
    for (std::size_t p : positions) out.push_back(values[p]);
    return out;
  };
  for (auto& s : report.subsets) {
    s.forest_median.clear();
    s.oracle_median.clear();
    for (const auto& tr : report.targets) {
      s.forest_median.push_back(median_or_nan(pick(tr.forest_errors, s.positions)));
      s.oracle_median.push_back(
          tr.oracle_errors.empty() ? kNaN
                                   : median_or_nan(pick(tr.oracle_errors, s.positions)));
    }
  }
  for (auto& f : report.folds) {
    f.forest_median.clear();
    for (const auto& tr : report.targets) {
      f.forest_median.push_back(median_or_nan(pick(tr.forest_errors, f.positions)));
    }
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const Dataset& train,
                                const Dataset* test, const BasisSet& basis,
                                const RandomForestModel* pretrained,
                                unsigned threads) {
  ExperimentResult result;
  EvalReport& report = result.report;
  report.experiment = experiment_name(spec.kind);
  report.spec = spec;
  report.train_fingerprint = train.fingerprint;

  const bool synthetic_train = spec.kind == ExperimentKind::kSyntheticToSynthetic ||
                               spec.kind == ExperimentKind::kSyntheticToRealImages;
  const TruthSource train_source =
      synthetic_train ? TruthSource::kSimulation : TruthSource::kOracle;
  const TruthSource test_source = spec.kind == ExperimentKind::kSyntheticToSynthetic
                                      ? TruthSource::kSimulation
                                      : TruthSource::kOracle;
  report.truth_source = truth_source_name(test_source);
  // The oracle cannot be compared against itself.
  report.comparison = test_source == TruthSource::kOracle ? "none" : "oracle";

  auto start_targets = [&](const std::vector<std::string>& names) {
    for (const auto& name : names) {
      TargetReport tr;
      tr.target = name;
      report.targets.push_back(std::move(tr));
    }
  };

  if (spec.kind == ExperimentKind::kRealToRealSpectra) {
    const TruthTable truth =
        truth_table(train, TruthSource::kOracle, spec.targets, basis, spec.oracle, threads);
    report.test_fingerprint = train.fingerprint;
    report.truth_failures = truth.failures;
    report.train_size = truth.rows.size();
    report.test_size = truth.rows.size();
    start_targets(truth.targets);
    const auto folds = kfold_split(truth.rows.size(), spec.folds, spec.fold_seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train_positions;
      for (std::size_t g = 0; g < folds.size(); ++g) {
        if (g != f) {
          train_positions.insert(train_positions.end(), folds[g].begin(),
                                 folds[g].end());
        }
      }
      std::sort(train_positions.begin(), train_positions.end());
      std::vector<std::size_t> train_rows;
      for (std::size_t p : train_positions) train_rows.push_back(truth.rows[p]);
      result.model = train_forest(spectra_of(train, train_rows),
                                  select_columns(truth, train_positions),
                                  truth.targets, spec.forest, threads);
      result.model.training_fingerprint = train.fingerprint;

      FoldReport fold;
      fold.fold = f;
      fold.train_size = train_positions.size();
      fold.test_size = folds[f].size();
      const std::size_t offset = report.targets.front().samples.size();
      for (std::size_t k = 0; k < folds[f].size(); ++k) fold.positions.push_back(offset + k);
      quantify(report, result.model, train, truth, folds[f], false, threads);
      report.folds.push_back(std::move(fold));
    }
    summarize(report);
    return result;
  }

  if (test == nullptr) throw ArgumentError(report.experiment + " needs a test dataset");
  report.test_fingerprint = test->fingerprint;
  const bool mismatch =
      pretrained != nullptr
          ? !test->records.empty() &&
                !pretrained->pipeline.matches_grid(test->records.front().spectrum)
          : !same_protocol(train, *test);
  if (mismatch && !spec.preprocess) {
    throw ArgumentError(
        "train and test datasets use different acquisition protocols; enable "
        "preprocess for " + report.experiment);
  }

  if (pretrained != nullptr) {
    result.model = *pretrained;
    report.train_size = 0;
  } else {
    const TruthTable truth =
        truth_table(train, train_source, spec.targets, basis, spec.oracle, threads);
    result.model = train_forest(spectra_of(train, truth.rows), truth.columns,
                                truth.targets, spec.forest, threads);
    result.model.training_fingerprint = train.fingerprint;
    report.train_size = truth.rows.size();
  }

  const TruthTable truth = truth_table(*test, test_source, result.model.target_names,
                                       basis, spec.oracle, threads);
  report.truth_failures = truth.failures;
  report.test_size = truth.rows.size();
  start_targets(truth.targets);
  std::vector<std::size_t> positions(truth.rows.size());
  for (std::size_t p = 0; p < positions.size(); ++p) positions[p] = p;
  quantify(report, result.model, *test, truth, positions, spec.preprocess, threads);

  if (test_source == TruthSource::kSimulation) {
    compare_oracle(report, *test, basis, spec.oracle, threads);
    add_artifact_subsets(report, *test);
  }
  summarize(report);
  return result;
}

}  // namespace mrsquant
