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

// Drives the command-line tool end to end in a scratch directory.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mrsquant/io.hpp"

using namespace mrsquant;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mrsquant_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string log = path("last.log");
  const std::string cmd =
      std::string("\"") + MRSQUANT_CLI + "\" --threads 1 " + args + " > \"" + log + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

void write(const std::string& file, const std::string& text) {
  std::ofstream(file, std::ios::binary) << text;
}

std::vector<std::vector<std::string>> read_csv(const std::string& file) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(file));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kClean =
    R"({"enable_noise": false, "baseline_amplitude_range": [0, 0],)"
    R"( "lipid_amplitude_range": [0, 0]})";

}  // namespace

TEST_CASE("simulate is deterministic") {
  REQUIRE(run("simulate --seed 5 --n-spectra 30 --name d -o " + path("a.json")).code == 0);
  const Run second = run("simulate --seed 5 --n-spectra 30 --name d -o " + path("b.json"));
  REQUIRE(second.code == 0);
  CHECK(second.output.find("fingerprint") != std::string::npos);
  CHECK(slurp(path("a.json")) == slurp(path("b.json")));
  REQUIRE(run("simulate --seed 6 --n-spectra 30 --name d -o " + path("c.json")).code == 0);
  CHECK(slurp(path("a.json")) != slurp(path("c.json")));
  CHECK(load_dataset(path("a.json")).size() == 30);
}

TEST_CASE("argument errors exit with code 2") {
  write(path("bad.json"), R"({"snr_range": [50, 5]})");
  const Run bad = run("simulate --seed 1 --config " + path("bad.json") + " -o " + path("x.json"));
  CHECK(bad.code == 2);
  CHECK(bad.output.find("snr_range") != std::string::npos);
  CHECK(!fs::exists(path("x.json")));

  CHECK(run("simulate -o " + path("x.json")).code == 2);
  CHECK(run("frobnicate").code == 2);

  REQUIRE(run("simulate --seed 1 --n-spectra 20 -o " + path("eval_train.json")).code == 0);
  const Run unknown = run("evaluate --experiment real-fake --train " + path("eval_train.json") +
                          " --seed 1 -o " + path("r.json"));
  CHECK(unknown.code == 2);
  CHECK(unknown.output.find("synthetic-synthetic") != std::string::npos);

  CHECK(run("train -d " + path("missing.json") + " --seed 1 -o " + path("m.json")).code != 0);
}

TEST_CASE("constant labels give a zero OOB curve") {
  write(path("const.json"), R"({"concentration_ranges": {"NAA": [1, 1], "Cr": [1, 1]}})");
  REQUIRE(run("simulate --seed 2 --n-spectra 40 --config " + path("const.json") + " -o " +
              path("const_data.json"))
              .code == 0);
  REQUIRE(run("train -d " + path("const_data.json") + " --seed 3 --n-trees 8 --max-features 8 -o " +
              path("const_model.json") + " --oob-csv " + path("const_oob.csv"))
              .code == 0);
  const auto rows = read_csv(path("const_oob.csv"));
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].back() == "0");
  }
}

TEST_CASE("training is reproducible and a memorized model predicts its labels") {
  write(path("clean.json"), kClean);
  REQUIRE(run("simulate --seed 4 --n-spectra 50 --config " + path("clean.json") + " -o " +
              path("clean_data.json"))
              .code == 0);
  const std::string train = "train -d " + path("clean_data.json") +
                            " --seed 9 --n-trees 1 --min-leaf-size 1 --max-features 215"
                            " --bootstrap identity -o ";
  REQUIRE(run(train + path("m1.json")).code == 0);
  REQUIRE(run(train + path("m2.json")).code == 0);
  CHECK(slurp(path("m1.json")) == slurp(path("m2.json")));

  REQUIRE(run("predict -m " + path("m1.json") + " -s " + path("clean_data.json") + " -o " +
              path("pred.csv"))
              .code == 0);
  const Dataset data = load_dataset(path("clean_data.json"));
  const auto rows = read_csv(path("pred.csv"));
  REQUIRE(rows.size() == data.size() + 1);
  REQUIRE(rows[0].size() == 1 + data.target_names.size());
  CHECK(rows[0][0] == "sample");
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(std::stoul(rows[i + 1][0]) == i);
    for (std::size_t t = 0; t < data.target_names.size(); ++t) {
      CHECK(std::stod(rows[i + 1][t + 1]) == data.records[i].labels.at(rows[0][t + 1]));
    }
  }
}

TEST_CASE("cross-protocol spectra need preprocessing") {
  REQUIRE(run("simulate --seed 7 --n-spectra 60 -o " + path("train60.json")).code == 0);
  REQUIRE(run("simulate --seed 8 --n-spectra 5 --spectral-width-hz 2000 --n-points 400 -o " +
              path("mrsi.json"))
              .code == 0);
  REQUIRE(run("train -d " + path("train60.json") + " --seed 1 --n-trees 4 --max-features 8 -o " +
              path("m60.json"))
              .code == 0);
  const std::string predict = "predict -m " + path("m60.json") + " -s " + path("mrsi.json") +
                              " -o " + path("mrsi.csv");
  CHECK(run(predict).code == 3);
  REQUIRE(run(predict + " --preprocess").code == 0);
  CHECK(read_csv(path("mrsi.csv")).size() == 6);

  Dataset empty = load_dataset(path("mrsi.json"));
  empty.records.clear();
  save_dataset(empty, path("empty.json"));
  CHECK(run("predict -m " + path("m60.json") + " -s " + path("empty.json") + " -o " +
            path("empty.csv"))
            .code == 2);
}

TEST_CASE("evaluate writes a loadable report and plot tables") {
  REQUIRE(run("simulate --seed 11 --n-spectra 80 -o " + path("ev_train.json")).code == 0);
  REQUIRE(run("simulate --seed 12 --n-spectra 20 -o " + path("ev_test.json")).code == 0);
  REQUIRE(run("evaluate --experiment synthetic-synthetic --train " + path("ev_train.json") +
              " --test " + path("ev_test.json") + " --seed 2 --n-trees 5 --max-features 8 -o " +
              path("report.json"))
              .code == 0);
  const std::string text = slurp(path("report.json"));
  const EvalReport report = load_report(path("report.json"));
  CHECK(serialize_report(report) == text);
  CHECK(report.test_size == 20);
  const auto errors = read_csv(path("report.errors.csv"));
  // One forest and one oracle row per sample and target.
  CHECK(errors.size() == 1 + 2 * 20 * report.targets.size());
  CHECK(read_csv(path("report.pairs.csv")).size() == 1 + 20 * report.targets.size());

  REQUIRE(run("oob-scan -d " + path("ev_train.json") +
              " --seed 1 --n-trees 3 --max-features-grid 1,4 --targets NAA/Cr -o " +
              path("scan.csv"))
              .code == 0);
  const auto scan = read_csv(path("scan.csv"));
  CHECK(scan[0] == std::vector<std::string>{"max_features", "target", "n_trees", "oob_error"});
  CHECK(scan.size() == 1 + 2 * 3);
}
