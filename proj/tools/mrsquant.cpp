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

// mrsquant command-line tool: simulate, train, predict, evaluate, oob-scan.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrsquant/error.hpp"
#include "mrsquant/experiment.hpp"
#include "mrsquant/io.hpp"
#include "mrsquant/parallel.hpp"

namespace fs = std::filesystem;
using namespace mrsquant;

namespace {

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_spectra;
  std::optional<double> spectral_width_hz;
  std::optional<std::size_t> n_points;
  bool no_noise = false;
};

struct ForestArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_trees;
  std::optional<std::size_t> max_features;
  std::optional<std::size_t> min_leaf_size;
  std::optional<std::size_t> max_depth;
  std::optional<std::string> bootstrap;
};

struct TrainArgs {
  ForestArgs forest;
  std::string dataset;
  std::string out;
  std::string oob_csv;
  std::vector<std::string> targets;
};

struct PredictArgs {
  std::string model;
  std::string spectra;
  std::string out;
  bool preprocess = false;
};

struct EvaluateArgs {
  std::string config;
  ForestArgs forest;
  std::optional<std::string> experiment;
  std::optional<std::string> train;
  std::optional<std::string> test;
  std::optional<std::string> model;
  std::optional<std::size_t> folds;
  bool preprocess = false;
  std::string out;
  std::string errors_csv;
  std::string pairs_csv;
};

struct ScanArgs {
  ForestArgs forest;
  std::string dataset;
  std::string out;
  std::vector<std::size_t> max_features{1, 4, 16, 64};
  std::vector<std::string> targets;
};

void add_forest_options(CLI::App* cmd, ForestArgs& f, bool seed_required) {
  auto* seed = cmd->add_option("--seed", f.seed, "Forest RNG seed");
  if (seed_required) seed->required();
  cmd->add_option("--forest-config", f.config, "Forest config JSON");
  cmd->add_option("--n-trees", f.n_trees, "Trees per target");
  cmd->add_option("--max-features", f.max_features, "Features tried per split");
  cmd->add_option("--min-leaf-size", f.min_leaf_size, "Minimum samples per leaf");
  cmd->add_option("--max-depth", f.max_depth, "Depth limit (0 = unlimited)");
  cmd->add_option("--bootstrap", f.bootstrap, "resample or identity");
}

ForestConfig resolve_forest(const ForestArgs& f, const Json* inline_config = nullptr) {
  ForestConfig c;
  if (!f.config.empty()) {
    c = forest_config_from_json(read_json_file(f.config));
  } else if (inline_config != nullptr) {
    c = forest_config_from_json(*inline_config);
  }
  if (f.seed) c.rng_seed = *f.seed;
  if (f.n_trees) c.n_trees = *f.n_trees;
  if (f.max_features) c.max_features = *f.max_features;
  if (f.min_leaf_size) c.min_leaf_size = *f.min_leaf_size;
  if (f.max_depth) c.max_depth = *f.max_depth;
  if (f.bootstrap) {
    Json j = to_json(c);
    j["bootstrap"] = *f.bootstrap;
    c = forest_config_from_json(j);
  }
  c.validate();
  return c;
}

std::string default_sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

int run_simulate(const SimulateArgs& a, unsigned threads) {
  SimulationConfig config;
  if (!a.config.empty()) {
    const fs::path path(a.config);
    config = simulation_config_from_json(read_json_file(path), path.parent_path());
  }
  config.rng_seed = *a.seed;
  if (a.n_spectra) config.n_spectra = *a.n_spectra;
  if (a.spectral_width_hz) config.basis.params.spectral_width_hz = *a.spectral_width_hz;
  if (a.n_points) config.basis.params.n_points = *a.n_points;
  if (a.no_noise) config.enable_noise = false;
  config.validate();

  const std::string name = a.name.empty() ? fs::path(a.out).stem().string() : a.name;
  const Dataset dataset = build_dataset(config, name, threads);
  save_dataset(dataset, a.out);

  std::cout << "wrote " << dataset.size() << " spectra to " << a.out << "\n"
            << "seed " << config.rng_seed << ", fingerprint " << dataset.fingerprint
            << "\n";
  for (const auto& [metabolite, r] : config.concentration_ranges) {
    std::cout << "  " << metabolite << " [" << format_double(r.min) << ", "
              << format_double(r.max) << "]"
              << (config.relative_to_reference && metabolite != config.ratio_reference
                      ? " x " + config.ratio_reference
                      : "")
              << "\n";
  }
  std::cout << "  t2_scale [" << format_double(config.t2_scale_range.min) << ", "
            << format_double(config.t2_scale_range.max) << "]\n"
            << "  snr [" << format_double(config.snr_range.min) << ", "
            << format_double(config.snr_range.max) << "]"
            << (config.enable_noise ? "" : " (noise off)") << "\n"
            << "  baseline [" << format_double(config.baseline_amplitude_range.min)
            << ", " << format_double(config.baseline_amplitude_range.max) << "]\n"
            << "  lipids [" << format_double(config.lipid_amplitude_range.min) << ", "
            << format_double(config.lipid_amplitude_range.max) << "]\n";
  return 0;
}

std::vector<std::string> resolve_targets(const Dataset& dataset,
                                         const std::vector<std::string>& requested) {
  const auto& targets = requested.empty() ? dataset.target_names : requested;
  if (targets.empty()) throw ArgumentError("dataset declares no targets");
  for (const auto& t : targets) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (!dataset.records[i].labels.contains(t)) {
        throw ArgumentError("target '" + t + "' missing from record " + std::to_string(i) +
                            " of the dataset");
      }
    }
  }
  return targets;
}

Dataset load_nonempty(const std::string& path) {
  Dataset d = load_dataset(path);
  if (d.size() == 0) throw ArgumentError(path + ": dataset has no spectra");
  return d;
}

RandomForestModel train_on(const Dataset& dataset, const std::vector<std::string>& targets,
                           const ForestConfig& config, unsigned threads) {
  std::vector<ComplexSpectrum> spectra;
  spectra.reserve(dataset.size());
  for (const auto& r : dataset.records) spectra.push_back(r.spectrum);
  std::vector<std::vector<double>> Y;
  for (const auto& t : targets) Y.push_back(dataset.labels(t));
  RandomForestModel model = train_forest(spectra, Y, targets, config, threads);
  model.training_fingerprint = dataset.fingerprint;
  return model;
}

int run_train(const TrainArgs& a, unsigned threads) {
  const ForestConfig config = resolve_forest(a.forest);
  const Dataset dataset = load_nonempty(a.dataset);
  const auto targets = resolve_targets(dataset, a.targets);
  const RandomForestModel model = train_on(dataset, targets, config, threads);
  save_model(model, a.out);
  const std::string oob = a.oob_csv.empty() ? default_sibling(a.out, ".oob.csv") : a.oob_csv;
  write_text(oob, oob_curve_csv(model));
  std::cout << "trained " << targets.size() << " x " << config.n_trees << " trees on "
            << dataset.size() << " spectra (" << model.n_features() << " features)\n";
  for (const auto& e : model.ensembles) {
    std::cout << "  " << e.target << " oob_error " << format_double(e.oob_error) << "\n";
  }
  std::cout << "model " << a.out << ", oob curve " << oob << "\n";
  return 0;
}

int run_predict(const PredictArgs& a) {
  const RandomForestModel model = load_model(a.model);
  const Dataset spectra = load_nonempty(a.spectra);
  if (!a.preprocess && !model.pipeline.matches_grid(spectra.records.front().spectrum)) {
    throw CompatibilityError(
        "spectra grid (" + std::to_string(spectra.params.n_points) + " points, " +
        format_double(spectra.params.spectral_width_hz) +
        " Hz) differs from the model's training grid; rerun with --preprocess");
  }
  std::string out = "sample";
  for (const auto& t : model.target_names) out += "," + csv_field(t);
  out += "\r\n";
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const auto features = model.pipeline.apply(spectra.records[i].spectrum, a.preprocess);
    const auto estimates = model.predict(features);
    out += std::to_string(i);
    for (const auto& t : model.target_names) out += "," + format_double(estimates.at(t));
    out += "\r\n";
  }
  write_text(a.out, out);
  std::cout << "wrote " << spectra.size() << " predictions to " << a.out << "\n";
  return 0;
}

BasisSet basis_for(const Json& experiment, const fs::path& base_dir, const Dataset& train) {
  if (auto it = experiment.find("basis_file"); it != experiment.end()) {
    fs::path file = it->get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return load_basis(file);
  }
  if (train.config) return train.config->basis;
  return default_brain_basis(train.params);
}

int run_evaluate(const EvaluateArgs& a, unsigned threads) {
  Json j = Json::object();
  fs::path base_dir;
  if (!a.config.empty()) {
    j = read_json_file(a.config);
    if (!j.is_object()) throw ArgumentError(a.config + ": expected a JSON object");
    base_dir = fs::path(a.config).parent_path();
  }
  auto path_of = [&](const std::optional<std::string>& flag,
                     const char* key) -> std::optional<std::string> {
    if (flag) return flag;
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
      fs::path p = it->get<std::string>();
      return (p.is_relative() ? base_dir / p : p).string();
    }
    return std::nullopt;
  };

  ExperimentSpec spec;
  std::string name = a.experiment.value_or(j.value("experiment", ""));
  if (name.empty()) {
    std::string names;
    for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
    throw ArgumentError("no experiment given; valid names: " + names);
  }
  spec.kind = parse_experiment(name);
  const Json* forest_json = j.contains("forest") ? &j["forest"] : nullptr;
  spec.forest = resolve_forest(a.forest, forest_json);
  if (j.contains("oracle")) spec.oracle = oracle_config_from_json(j["oracle"]);
  spec.preprocess = a.preprocess || j.value("preprocess", false);
  spec.folds = a.folds.value_or(j.value("folds", spec.folds));
  spec.fold_seed = j.value("fold_seed", spec.forest.rng_seed);
  if (j.contains("targets")) spec.targets = j["targets"].get<std::vector<std::string>>();

  const auto train_path = path_of(a.train, "train");
  if (!train_path) throw ArgumentError("evaluate needs a training dataset (--train)");
  const Dataset train = load_nonempty(*train_path);
  std::optional<Dataset> test;
  if (spec.kind != ExperimentKind::kRealToRealSpectra) {
    const auto test_path = path_of(a.test, "test");
    if (!test_path) throw ArgumentError(name + " needs a test dataset (--test)");
    test = load_nonempty(*test_path);
  }
  std::optional<RandomForestModel> pretrained;
  if (const auto model_path = path_of(a.model, "model")) {
    pretrained = load_model(*model_path);
  }
  const BasisSet basis = basis_for(j, base_dir, train);

  const ExperimentResult result =
      run_experiment(spec, train, test ? &*test : nullptr, basis,
                     pretrained ? &*pretrained : nullptr, threads);
  const EvalReport& report = result.report;
  save_report(report, a.out);
  const std::string errors =
      a.errors_csv.empty() ? default_sibling(a.out, ".errors.csv") : a.errors_csv;
  const std::string pairs =
      a.pairs_csv.empty() ? default_sibling(a.out, ".pairs.csv") : a.pairs_csv;
  write_text(errors, errors_csv(report));
  write_text(pairs, pairs_csv(report));

  std::cout << report.experiment << " (truth: " << report.truth_source << ", "
            << report.test_size << " test spectra)\n";
  for (const auto& t : report.targets) {
    std::cout << "  " << t.target << " forest median_error "
              << format_double(t.forest.errors.median) << " pearson_r "
              << format_double(t.forest.pearson_r);
    if (t.oracle) {
      std::cout << " | oracle median_error " << format_double(t.oracle->errors.median)
                << " pearson_r " << format_double(t.oracle->pearson_r);
    }
    std::cout << "\n";
  }
  std::cout << "report " << a.out << ", errors " << errors << ", pairs " << pairs << "\n";
  return 0;
}

int run_scan(const ScanArgs& a, unsigned threads) {
  const ForestConfig base = resolve_forest(a.forest);
  const Dataset dataset = load_nonempty(a.dataset);
  const auto targets = resolve_targets(dataset, a.targets);
  std::string out = "max_features,target,n_trees,oob_error\r\n";
  for (std::size_t mf : a.max_features) {
    ForestConfig config = base;
    config.max_features = mf;
    const RandomForestModel model = train_on(dataset, targets, config, threads);
    for (const auto& e : model.ensembles) {
      for (std::size_t m = 0; m < e.oob_curve.size(); ++m) {
        out += std::to_string(mf) + "," + csv_field(e.target) + "," + std::to_string(m + 1) +
               "," + format_double(e.oob_curve[m]) + "\r\n";
      }
      std::cout << "max_features " << mf << " " << e.target << " oob_error "
                << format_double(e.oob_error) << "\n";
    }
  }
  write_text(a.out, out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-forest metabolite quantification for MR spectra"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides MRSQUANT_THREADS)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a labeled dataset");
  simulate->add_option("--config", sim.config, "Simulation config JSON");
  simulate->add_option("--seed", sim.seed, "Simulation RNG seed")->required();
  simulate->add_option("-o,--out", sim.out, "Dataset output path")->required();
  simulate->add_option("--name", sim.name, "Dataset name");
  simulate->add_option("--n-spectra", sim.n_spectra, "Number of spectra");
  simulate->add_option("--spectral-width-hz", sim.spectral_width_hz, "Spectral width");
  simulate->add_option("--n-points", sim.n_points, "Points per spectrum");
  simulate->add_flag("--no-noise", sim.no_noise, "Disable noise");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a forest on a dataset");
  train->add_option("-d,--dataset", tr.dataset, "Training dataset")->required();
  train->add_option("-o,--out", tr.out, "Model output path")->required();
  train->add_option("--oob-csv", tr.oob_csv, "OOB curve CSV path");
  train->add_option("--targets", tr.targets, "Targets to train")->delimiter(',');
  add_forest_options(train, tr.forest, true);

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Quantify spectra with a trained model");
  predict->add_option("-m,--model", pr.model, "Model file")->required();
  predict->add_option("-s,--spectra", pr.spectra, "Spectra dataset")->required();
  predict->add_option("-o,--out", pr.out, "Predictions CSV")->required();
  predict->add_flag("--preprocess", pr.preprocess, "Crop, resample and normalize");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Run an experiment and write a report");
  evaluate->add_option("--config", ev.config, "Experiment config JSON");
  evaluate->add_option("--experiment", ev.experiment, "Experiment name");
  evaluate->add_option("--train", ev.train, "Training dataset");
  evaluate->add_option("--test", ev.test, "Test dataset");
  evaluate->add_option("--model", ev.model, "Pretrained model");
  evaluate->add_option("--folds", ev.folds, "Cross-validation folds");
  evaluate->add_flag("--preprocess", ev.preprocess, "Allow cross-protocol preprocessing");
  evaluate->add_option("-o,--out", ev.out, "Report JSON path")->required();
  evaluate->add_option("--errors-csv", ev.errors_csv, "Per-sample errors CSV");
  evaluate->add_option("--pairs-csv", ev.pairs_csv, "Truth/estimate pairs CSV");
  add_forest_options(evaluate, ev.forest, false);

  ScanArgs sc;
  auto* scan = app.add_subcommand("oob-scan", "Sweep trees x features and record OOB error");
  scan->add_option("-d,--dataset", sc.dataset, "Training dataset")->required();
  scan->add_option("-o,--out", sc.out, "Scan CSV path")->required();
  scan->add_option("--max-features-grid", sc.max_features, "max_features values")
      ->delimiter(',');
  scan->add_option("--targets", sc.targets, "Targets to scan")->delimiter(',');
  add_forest_options(scan, sc.forest, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfiguration);
  }

  try {
    threads = resolve_threads(threads);
    if (*simulate) return run_simulate(sim, threads);
    if (*train) return run_train(tr, threads);
    if (*predict) return run_predict(pr);
    if (*evaluate) return run_evaluate(ev, threads);
    if (*scan) return run_scan(sc, threads);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfiguration);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfiguration);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
  return 0;
}
