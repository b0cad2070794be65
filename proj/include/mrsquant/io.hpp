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

// Persistent formats: basis sets, datasets, models and reports as JSON, plot
// data as CSV. Every file carries a format tag, a version and the fingerprint
// of the configuration that produced it.

#ifndef MRSQUANT_IO_HPP_
#define MRSQUANT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mrsquant/basis.hpp"
#include "mrsquant/experiment.hpp"
#include "mrsquant/forest.hpp"
#include "mrsquant/linear_fit.hpp"
#include "mrsquant/simulator.hpp"

namespace mrsquant {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// --- encoding helpers ------------------------------------------------------

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws FormatError on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian float64 pairs (re, im), base64 encoded.
std::string encode_complex(std::span<const Complex> values);
std::vector<Complex> decode_complex(std::string_view text);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string content_hash(const Json& value);
// "<seed>-<hash>".
std::string fingerprint(std::uint64_t seed, const Json& config);

// Shortest text that parses back to the same double.
std::string format_double(double value);

// --- JSON mappings ---------------------------------------------------------
// Readers fill missing fields with defaults and report type errors with the
// field path. They do not call validate().

Json to_json(const AcquisitionParams& params);
AcquisitionParams acquisition_from_json(const Json& j, const std::string& path = "acquisition");

Json to_json(const BasisSet& basis);
BasisSet basis_from_json(const Json& j);

Json to_json(const SimulationConfig& config);
// `base_dir` resolves a relative "basis_file".
SimulationConfig simulation_config_from_json(const Json& j,
                                             const std::filesystem::path& base_dir = {});

Json to_json(const ForestConfig& config);
ForestConfig forest_config_from_json(const Json& j);

Json to_json(const OracleConfig& config);
OracleConfig oracle_config_from_json(const Json& j);

Json to_json(const FeaturePipeline& pipeline);
FeaturePipeline pipeline_from_json(const Json& j);

Json to_json(const EvalReport& report);
EvalReport report_from_json(const Json& j);

// --- files -----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path);
// Writes atomically via a temporary file in the same directory.
void write_text(const std::filesystem::path& path, std::string_view text);
// Parses JSON; FormatError names the file and byte offset.
Json read_json_file(const std::filesystem::path& path);

void save_basis(const BasisSet& basis, const std::filesystem::path& path);
BasisSet load_basis(const std::filesystem::path& path);

// Simulates `config` and stamps the result with its fingerprint.
Dataset build_dataset(const SimulationConfig& config, const std::string& name,
                      unsigned threads = 0);

std::string serialize_dataset(const Dataset& dataset);
Dataset deserialize_dataset(std::string_view text);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

std::string serialize_model(const RandomForestModel& model);
// FormatError on malformed input (no partial model is returned),
// UnsupportedVersionError on a version mismatch.
RandomForestModel deserialize_model(std::string_view text);
void save_model(const RandomForestModel& model, const std::filesystem::path& path);
RandomForestModel load_model(const std::filesystem::path& path);

std::string serialize_report(const EvalReport& report);
EvalReport deserialize_report(std::string_view text);
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

// --- CSV -------------------------------------------------------------------

// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

// target,n_trees,oob_error
std::string oob_curve_csv(const RandomForestModel& model);
// sample,target,method,estimate,truth,error
std::string errors_csv(const EvalReport& report);
// sample,target,truth,forest,oracle
std::string pairs_csv(const EvalReport& report);

}  // namespace mrsquant

#endif  // MRSQUANT_IO_HPP_
