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

#include "mrsquant/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mrsquant/error.hpp"

namespace mrsquant {
namespace {

constexpr char kBasisFormat[] = "mrsquant-basis";
constexpr char kDatasetFormat[] = "mrsquant-dataset";
constexpr char kModelFormat[] = "mrsquant-model";
constexpr char kReportFormat[] = "mrsquant-report";
constexpr char kNoiseDefinition[] =
    "per-bin circular complex Gaussian, sigma = max|S| / snr";

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError("missing field '" + join(path, key) + "'");
  return *it;
}

template <class T>
T as(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <class T>
T optional_field(const Json& j, const char* key, T fallback,
                 const std::string& path) {
  if (!j.is_object()) throw FormatError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return as<T>(*it, join(path, key));
}

std::size_t as_size(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw ArgumentError(path + ": must be >= 0, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }
  throw FormatError(path + ": expected a non-negative integer");
}

std::size_t optional_size(const Json& j, const char* key, std::size_t fallback,
                          const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return as_size(*it, join(path, key));
}

std::uint64_t optional_seed(const Json& j, const char* key, std::uint64_t fallback,
                            const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return static_cast<std::uint64_t>(as_size(*it, join(path, key)));
}

// Null encodes NaN.
double number_or_nan(const Json& j, const std::string& path) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw FormatError(path + ": expected a number");
  return j.get<double>();
}

std::vector<double> doubles(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_or_nan(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::size_t> sizes(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path + ": expected an array");
  std::vector<std::size_t> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_size(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json range_to_json(const Range& r) { return Json::array({r.min, r.max}); }

Range range_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ArgumentError(path + ": expected [min, max]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void check_header(const Json& j, const char* format, const std::string& what) {
  if (!j.is_object()) throw FormatError(what + ": top level is not an object");
  const auto tag = as<std::string>(require(j, "format", ""), "format");
  if (tag != format) {
    throw FormatError(what + ": format is '" + tag + "', expected '" + format + "'");
  }
  const Json& version = require(j, "version", "");
  if (!version.is_number_integer() || version.get<std::int64_t>() != kFormatVersion) {
    throw UnsupportedVersionError(what + ": unsupported version " + version.dump() +
                                  " (this build reads version " +
                                  std::to_string(kFormatVersion) + ")");
  }
}

Json parse_text(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw FormatError(what + ": malformed JSON at byte " + std::to_string(e.byte) +
                      ": " + e.what());
  }
}

Json stats_to_json(const MethodSummary& s) {
  return {{"count", s.errors.count},   {"min_error", s.errors.min},
          {"q1_error", s.errors.q1},   {"median_error", s.errors.median},
          {"q3_error", s.errors.q3},   {"max_error", s.errors.max},
          {"mean_error", s.errors.mean}, {"pearson_r", s.pearson_r}};
}

Json tree_to_json(const RegressionTree& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(),
       right = Json::array(), value = Json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value}};
}

RegressionTree tree_from_json(const Json& j, const std::string& path) {
  const auto& feature = require(j, "feature", path);
  const auto threshold = doubles(require(j, "threshold", path), path + ".threshold");
  const auto left = sizes(require(j, "left", path), path + ".left");
  const auto right = sizes(require(j, "right", path), path + ".right");
  const auto value = doubles(require(j, "value", path), path + ".value");
  if (!feature.is_array()) throw FormatError(path + ".feature: expected an array");
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n) {
    throw FormatError(path + ": node arrays differ in length");
  }
  RegressionTree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = as<std::int64_t>(feature[i], path + ".feature[" + std::to_string(i) + "]");
    if (f < -1 || f > std::numeric_limits<std::int32_t>::max() ||
        left[i] > UINT32_MAX || right[i] > UINT32_MAX) {
      throw FormatError(path + ": node " + std::to_string(i) + " out of range");
    }
    tree.nodes[i] = {static_cast<std::int32_t>(f), threshold[i],
                     static_cast<std::uint32_t>(left[i]),
                     static_cast<std::uint32_t>(right[i]), value[i]};
  }
  return tree;
}

Json record_truth_to_json(const SimulationRecord& r) {
  return {{"concentrations", r.concentrations},
          {"t2_scale", r.t2_scale},
          {"snr", r.snr},
          {"baseline_scale", r.baseline_scale},
          {"lipid_scale", r.lipid_scale}};
}

SimulationRecord record_truth_from_json(const Json& j, const std::string& path) {
  SimulationRecord r;
  const Json& conc = require(j, "concentrations", path);
  if (!conc.is_object()) throw FormatError(path + ".concentrations: expected an object");
  for (const auto& [name, value] : conc.items()) {
    r.concentrations[name] = number_or_nan(value, path + ".concentrations." + name);
  }
  r.t2_scale = number_or_nan(require(j, "t2_scale", path), path + ".t2_scale");
  r.snr = number_or_nan(require(j, "snr", path), path + ".snr");
  r.baseline_scale =
      number_or_nan(require(j, "baseline_scale", path), path + ".baseline_scale");
  r.lipid_scale = number_or_nan(require(j, "lipid_scale", path), path + ".lipid_scale");
  return r;
}

}  // namespace

// --- encoding --------------------------------------------------------------

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kBase64Alphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  static const auto table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int k = 0; k < 64; ++k) t[static_cast<unsigned char>(kBase64Alphabet[k])] = k;
    return t;
  }();
  if (text.size() % 4 != 0) {
    throw FormatError("base64 block length " + std::to_string(text.size()) +
                      " is not a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + static_cast<std::size_t>(k)];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw FormatError("base64: data after padding");
      v[k] = table[static_cast<unsigned char>(c)];
      if (v[k] < 0) {
        throw FormatError("base64: invalid character at offset " +
                          std::to_string(i + static_cast<std::size_t>(k)));
      }
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word));
  }
  return out;
}

std::string encode_complex(std::span<const Complex> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 16);
  auto put = [&](double d) {
    auto bits = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) {
      bytes.push_back(static_cast<std::uint8_t>(bits & 0xff));
      bits >>= 8;
    }
  };
  for (const auto& v : values) {
    put(v.real());
    put(v.imag());
  }
  return base64_encode(bytes);
}

std::vector<Complex> decode_complex(std::string_view text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 16 != 0) {
    throw FormatError("complex block of " + std::to_string(bytes.size()) +
                      " bytes is not a whole number of float64 pairs");
  }
  auto get = [&](std::size_t offset) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[offset + static_cast<std::size_t>(b)];
    return std::bit_cast<double>(bits);
  };
  std::vector<Complex> out(bytes.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {get(16 * i), get(16 * i + 8)};
  return out;
}

std::string content_hash(const Json& value) {
  const std::string text = value.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(std::uint64_t seed, const Json& config) {
  return std::to_string(seed) + "-" + content_hash(config);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// --- JSON mappings ---------------------------------------------------------

Json to_json(const AcquisitionParams& p) {
  return {{"spectral_width_hz", p.spectral_width_hz},
          {"n_points", p.n_points},
          {"transmitter_freq_mhz", p.transmitter_freq_mhz},
          {"echo_time_ms", p.echo_time_ms},
          {"repetition_time_ms", p.repetition_time_ms}};
}

AcquisitionParams acquisition_from_json(const Json& j, const std::string& path) {
  AcquisitionParams p;
  p.spectral_width_hz =
      optional_field(j, "spectral_width_hz", p.spectral_width_hz, path);
  p.n_points = optional_size(j, "n_points", p.n_points, path);
  p.transmitter_freq_mhz =
      optional_field(j, "transmitter_freq_mhz", p.transmitter_freq_mhz, path);
  p.echo_time_ms = optional_field(j, "echo_time_ms", p.echo_time_ms, path);
  p.repetition_time_ms =
      optional_field(j, "repetition_time_ms", p.repetition_time_ms, path);
  return p;
}

Json to_json(const BasisSet& basis) {
  Json metabolites = Json::array();
  for (const auto& m : basis.metabolites) {
    Json components = Json::array();
    for (const auto& c : m.components) {
      components.push_back({{"shift_ppm", c.shift_ppm},
                            {"amplitude", c.amplitude},
                            {"t2_s", c.t2_s},
                            {"phase0_rad", c.phase0_rad}});
    }
    metabolites.push_back({{"name", m.name}, {"components", components}});
  }
  return {{"format", kBasisFormat},
          {"version", kFormatVersion},
          {"name", basis.name},
          {"reference_ppm", basis.reference_ppm},
          {"acquisition", to_json(basis.params)},
          {"metabolites", metabolites}};
}

BasisSet basis_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("basis: expected an object");
  if (j.contains("format")) check_header(j, kBasisFormat, "basis");
  BasisSet basis;
  basis.name = optional_field<std::string>(j, "name", "", "basis");
  basis.reference_ppm =
      optional_field(j, "reference_ppm", kDefaultReferencePpm, "basis");
  basis.params = acquisition_from_json(require(j, "acquisition", "basis"),
                                       "basis.acquisition");
  const Json& metabolites = require(j, "metabolites", "basis");
  if (!metabolites.is_array()) throw FormatError("basis.metabolites: expected an array");
  for (std::size_t i = 0; i < metabolites.size(); ++i) {
    const std::string path = "basis.metabolites[" + std::to_string(i) + "]";
    MetaboliteBasis m;
    m.name = as<std::string>(require(metabolites[i], "name", path), path + ".name");
    const Json& components = require(metabolites[i], "components", path);
    if (!components.is_array()) throw FormatError(path + ".components: expected an array");
    for (std::size_t k = 0; k < components.size(); ++k) {
      const std::string cpath = path + ".components[" + std::to_string(k) + "]";
      const Json& c = components[k];
      LorentzianComponent lc;
      lc.shift_ppm = as<double>(require(c, "shift_ppm", cpath), cpath + ".shift_ppm");
      lc.amplitude = as<double>(require(c, "amplitude", cpath), cpath + ".amplitude");
      lc.t2_s = as<double>(require(c, "t2_s", cpath), cpath + ".t2_s");
      lc.phase0_rad = optional_field(c, "phase0_rad", 0.0, cpath);
      m.components.push_back(lc);
    }
    basis.metabolites.push_back(std::move(m));
  }
  return basis;
}

Json to_json(const SimulationConfig& c) {
  Json ranges = Json::object();
  for (const auto& [name, r] : c.concentration_ranges) ranges[name] = range_to_json(r);
  return {{"n_spectra", c.n_spectra},
          {"rng_seed", c.rng_seed},
          {"concentration_ranges", ranges},
          {"ratio_reference", c.ratio_reference},
          {"relative_to_reference", c.relative_to_reference},
          {"t2_scale_range", range_to_json(c.t2_scale_range)},
          {"snr_range", range_to_json(c.snr_range)},
          {"baseline_amplitude_range", range_to_json(c.baseline_amplitude_range)},
          {"lipid_amplitude_range", range_to_json(c.lipid_amplitude_range)},
          {"enable_noise", c.enable_noise},
          {"basis", to_json(c.basis)}};
}

SimulationConfig simulation_config_from_json(const Json& j,
                                             const std::filesystem::path& base_dir) {
  const std::string path = "config";
  if (!j.is_object()) throw ArgumentError("simulation config must be a JSON object");
  SimulationConfig c;
  c.n_spectra = optional_size(j, "n_spectra", c.n_spectra, path);
  c.rng_seed = optional_seed(j, "rng_seed", c.rng_seed, path);
  if (auto it = j.find("concentration_ranges"); it != j.end()) {
    if (!it->is_object()) throw ArgumentError("concentration_ranges: expected an object");
    c.concentration_ranges.clear();
    for (const auto& [name, r] : it->items()) {
      c.concentration_ranges[name] = range_from_json(r, "concentration_ranges." + name);
    }
  }
  c.ratio_reference = optional_field(j, "ratio_reference", c.ratio_reference, path);
  c.relative_to_reference =
      optional_field(j, "relative_to_reference", c.relative_to_reference, path);
  auto range = [&](const char* key, Range fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : range_from_json(*it, key);
  };
  c.t2_scale_range = range("t2_scale_range", c.t2_scale_range);
  c.snr_range = range("snr_range", c.snr_range);
  c.baseline_amplitude_range = range("baseline_amplitude_range", c.baseline_amplitude_range);
  c.lipid_amplitude_range = range("lipid_amplitude_range", c.lipid_amplitude_range);
  c.enable_noise = optional_field(j, "enable_noise", c.enable_noise, path);
  if (auto it = j.find("basis"); it != j.end()) {
    c.basis = basis_from_json(*it);
  } else if (auto f = j.find("basis_file"); f != j.end()) {
    std::filesystem::path file = as<std::string>(*f, "basis_file");
    if (file.is_relative()) file = base_dir / file;
    c.basis = load_basis(file);
  }
  if (auto it = j.find("acquisition"); it != j.end()) {
    c.basis.params = acquisition_from_json(*it, "acquisition");
  }
  return c;
}

Json to_json(const ForestConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_features", c.max_features},
          {"min_leaf_size", c.min_leaf_size},
          {"max_depth", c.max_depth},
          {"rng_seed", c.rng_seed},
          {"bootstrap", c.bootstrap == BootstrapMode::kIdentity ? "identity" : "resample"}};
}

ForestConfig forest_config_from_json(const Json& j) {
  const std::string path = "forest";
  if (!j.is_object()) throw ArgumentError("forest config must be a JSON object");
  ForestConfig c;
  c.n_trees = optional_size(j, "n_trees", c.n_trees, path);
  c.max_features = optional_size(j, "max_features", c.max_features, path);
  c.min_leaf_size = optional_size(j, "min_leaf_size", c.min_leaf_size, path);
  c.max_depth = optional_size(j, "max_depth", c.max_depth, path);
  c.rng_seed = optional_seed(j, "rng_seed", c.rng_seed, path);
  const auto mode = optional_field<std::string>(j, "bootstrap", "resample", path);
  if (mode == "resample") {
    c.bootstrap = BootstrapMode::kResample;
  } else if (mode == "identity") {
    c.bootstrap = BootstrapMode::kIdentity;
  } else {
    throw ArgumentError("forest.bootstrap: expected 'resample' or 'identity', got '" +
                        mode + "'");
  }
  return c;
}

Json to_json(const OracleConfig& c) {
  return {{"baseline_degree", c.baseline_degree},
          {"crop_high_ppm", c.crop_high_ppm},
          {"crop_low_ppm", c.crop_low_ppm}};
}

OracleConfig oracle_config_from_json(const Json& j) {
  const std::string path = "oracle";
  if (!j.is_object()) throw ArgumentError("oracle config must be a JSON object");
  OracleConfig c;
  c.baseline_degree = optional_field(j, "baseline_degree", c.baseline_degree, path);
  c.crop_high_ppm = optional_field(j, "crop_high_ppm", c.crop_high_ppm, path);
  c.crop_low_ppm = optional_field(j, "crop_low_ppm", c.crop_low_ppm, path);
  return c;
}

Json to_json(const FeaturePipeline& p) {
  return {{"crop_high_ppm", p.crop_high_ppm},
          {"crop_low_ppm", p.crop_low_ppm},
          {"grid", p.grid},
          {"reference_max_magnitude", p.reference_max_magnitude},
          {"reference_index", p.reference_index},
          {"representation", p.representation},
          {"zero_fill", p.zero_fill}};
}

FeaturePipeline pipeline_from_json(const Json& j) {
  const std::string path = "pipeline";
  FeaturePipeline p;
  p.crop_high_ppm = as<double>(require(j, "crop_high_ppm", path), path + ".crop_high_ppm");
  p.crop_low_ppm = as<double>(require(j, "crop_low_ppm", path), path + ".crop_low_ppm");
  p.grid = doubles(require(j, "grid", path), path + ".grid");
  p.reference_max_magnitude = as<double>(require(j, "reference_max_magnitude", path),
                                         path + ".reference_max_magnitude");
  p.reference_index = as_size(require(j, "reference_index", path), path + ".reference_index");
  p.representation =
      as<std::string>(require(j, "representation", path), path + ".representation");
  p.zero_fill = as<bool>(require(j, "zero_fill", path), path + ".zero_fill");
  if (p.representation != "real") {
    throw FormatError(path + ".representation: unsupported '" + p.representation + "'");
  }
  return p;
}

Json to_json(const EvalReport& r) {
  Json spec = {{"experiment", experiment_name(r.spec.kind)},
               {"forest", to_json(r.spec.forest)},
               {"oracle", to_json(r.spec.oracle)},
               {"preprocess", r.spec.preprocess},
               {"folds", r.spec.folds},
               {"fold_seed", r.spec.fold_seed},
               {"targets", r.spec.targets}};
  Json targets = Json::array();
  for (const auto& t : r.targets) {
    targets.push_back({{"target", t.target},
                       {"forest", stats_to_json(t.forest)},
                       {"oracle", t.oracle ? stats_to_json(*t.oracle) : Json()},
                       {"oracle_failures", t.oracle_failures},
                       {"samples", t.samples},
                       {"truths", t.truths},
                       {"forest_estimates", t.forest_estimates},
                       {"forest_errors", t.forest_errors},
                       {"oracle_estimates", t.oracle_estimates},
                       {"oracle_errors", t.oracle_errors}});
  }
  Json subsets = Json::array();
  for (const auto& s : r.subsets) {
    subsets.push_back({{"name", s.name},
                       {"selection", s.selection},
                       {"positions", s.positions},
                       {"forest_median_error", s.forest_median},
                       {"oracle_median_error", s.oracle_median}});
  }
  Json folds = Json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"fold", f.fold},
                     {"positions", f.positions},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"forest_median_error", f.forest_median}});
  }
  Json fp = {{"spec", spec},
             {"train", r.train_fingerprint},
             {"test", r.test_fingerprint}};
  return {{"format", kReportFormat},
          {"version", kFormatVersion},
          {"fingerprint", fingerprint(r.spec.forest.rng_seed, fp)},
          {"experiment", r.experiment},
          {"truth_source", r.truth_source},
          {"comparison", r.comparison},
          {"correlation", "pearson_r"},
          {"spec", spec},
          {"train_fingerprint", r.train_fingerprint},
          {"test_fingerprint", r.test_fingerprint},
          {"train_size", r.train_size},
          {"test_size", r.test_size},
          {"truth_failures", r.truth_failures},
          {"targets", targets},
          {"subsets", subsets},
          {"folds", folds}};
}

EvalReport report_from_json(const Json& j) {
  check_header(j, kReportFormat, "report");
  EvalReport r;
  r.experiment = as<std::string>(require(j, "experiment", ""), "experiment");
  r.truth_source = as<std::string>(require(j, "truth_source", ""), "truth_source");
  r.comparison = as<std::string>(require(j, "comparison", ""), "comparison");
  const Json& spec = require(j, "spec", "");
  r.spec.kind = parse_experiment(as<std::string>(require(spec, "experiment", "spec"),
                                                 "spec.experiment"));
  r.spec.forest = forest_config_from_json(require(spec, "forest", "spec"));
  r.spec.oracle = oracle_config_from_json(require(spec, "oracle", "spec"));
  r.spec.preprocess = as<bool>(require(spec, "preprocess", "spec"), "spec.preprocess");
  r.spec.folds = as_size(require(spec, "folds", "spec"), "spec.folds");
  r.spec.fold_seed = as_size(require(spec, "fold_seed", "spec"), "spec.fold_seed");
  r.spec.targets =
      as<std::vector<std::string>>(require(spec, "targets", "spec"), "spec.targets");
  r.train_fingerprint = as<std::string>(require(j, "train_fingerprint", ""), "train_fingerprint");
  r.test_fingerprint = as<std::string>(require(j, "test_fingerprint", ""), "test_fingerprint");
  r.train_size = as_size(require(j, "train_size", ""), "train_size");
  r.test_size = as_size(require(j, "test_size", ""), "test_size");
  r.truth_failures = as_size(require(j, "truth_failures", ""), "truth_failures");

  const Json& targets = require(j, "targets", "");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string path = "targets[" + std::to_string(i) + "]";
    const Json& t = targets[i];
    TargetReport tr;
    tr.target = as<std::string>(require(t, "target", path), path + ".target");
    tr.samples = sizes(require(t, "samples", path), path + ".samples");
    tr.truths = doubles(require(t, "truths", path), path + ".truths");
    tr.forest_estimates = doubles(require(t, "forest_estimates", path), path + ".forest_estimates");
    tr.forest_errors = doubles(require(t, "forest_errors", path), path + ".forest_errors");
    tr.oracle_estimates = doubles(require(t, "oracle_estimates", path), path + ".oracle_estimates");
    tr.oracle_errors = doubles(require(t, "oracle_errors", path), path + ".oracle_errors");
    const std::size_t n = tr.samples.size();
    if (tr.truths.size() != n || tr.forest_estimates.size() != n ||
        tr.forest_errors.size() != n ||
        (!tr.oracle_estimates.empty() && tr.oracle_estimates.size() != n) ||
        tr.oracle_errors.size() != tr.oracle_estimates.size()) {
      throw FormatError(path + ": per-sample arrays differ in length");
    }
    r.targets.push_back(std::move(tr));
  }
  const std::size_t n_samples = r.targets.empty() ? 0 : r.targets.front().samples.size();
  auto check_positions = [&](const std::vector<std::size_t>& positions,
                             const std::string& path) {
    for (std::size_t p : positions) {
      if (p >= n_samples) throw FormatError(path + ": position out of range");
    }
  };
  const Json& subsets = require(j, "subsets", "");
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const std::string path = "subsets[" + std::to_string(i) + "]";
    SubsetReport s;
    s.name = as<std::string>(require(subsets[i], "name", path), path + ".name");
    s.selection = as<std::string>(require(subsets[i], "selection", path), path + ".selection");
    s.positions = sizes(require(subsets[i], "positions", path), path + ".positions");
    check_positions(s.positions, path);
    r.subsets.push_back(std::move(s));
  }
  const Json& folds = require(j, "folds", "");
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const std::string path = "folds[" + std::to_string(i) + "]";
    FoldReport f;
    f.fold = as_size(require(folds[i], "fold", path), path + ".fold");
    f.positions = sizes(require(folds[i], "positions", path), path + ".positions");
    check_positions(f.positions, path);
    f.train_size = as_size(require(folds[i], "train_size", path), path + ".train_size");
    f.test_size = as_size(require(folds[i], "test_size", path), path + ".test_size");
    r.folds.push_back(std::move(f));
  }
  summarize(r);
  return r;
}

// --- files -----------------------------------------------------------------

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + tmp + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ArgumentError("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_text(read_text(path), path.string());
}

void save_basis(const BasisSet& basis, const std::filesystem::path& path) {
  write_text(path, to_json(basis).dump(2) + "\n");
}

BasisSet load_basis(const std::filesystem::path& path) {
  BasisSet basis = basis_from_json(read_json_file(path));
  basis.validate();
  return basis;
}

Dataset build_dataset(const SimulationConfig& config, const std::string& name,
                      unsigned threads) {
  config.validate();
  Dataset d;
  d.name = name;
  d.params = config.basis.params;
  d.reference_ppm = config.basis.reference_ppm;
  d.target_names = config.target_names();
  d.config = config;
  d.fingerprint = fingerprint(config.rng_seed, to_json(config));
  d.records = simulate_dataset(config, threads);
  return d;
}

std::string serialize_dataset(const Dataset& d) {
  Json header = {{"format", kDatasetFormat},
                 {"version", kFormatVersion},
                 {"name", d.name},
                 {"fingerprint", d.fingerprint},
                 {"config", d.config ? to_json(*d.config) : Json()},
                 {"acquisition", to_json(d.params)},
                 {"reference_ppm", d.reference_ppm},
                 {"ppm_grid", d.ppm_grid()},
                 {"target_names", d.target_names},
                 {"noise_definition", kNoiseDefinition},
                 {"record_count", d.records.size()}};
  std::string out = header.dump();
  out.pop_back();
  out += ",\"records\":[";
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    Json record = {{"labels", r.labels},
                   {"truth", record_truth_to_json(r.truth)},
                   {"spectrum", encode_complex(r.spectrum.values)}};
    out += i == 0 ? "\n" : ",\n";
    out += record.dump();
  }
  out += "\n]}\n";
  return out;
}

Dataset deserialize_dataset(std::string_view text) {
  const Json j = parse_text(text, "dataset");
  check_header(j, kDatasetFormat, "dataset");
  Dataset d;
  d.name = as<std::string>(require(j, "name", ""), "name");
  d.fingerprint = as<std::string>(require(j, "fingerprint", ""), "fingerprint");
  d.params = acquisition_from_json(require(j, "acquisition", ""), "acquisition");
  d.params.validate();
  d.reference_ppm = as<double>(require(j, "reference_ppm", ""), "reference_ppm");
  d.target_names =
      as<std::vector<std::string>>(require(j, "target_names", ""), "target_names");
  const Json& config = require(j, "config", "");
  if (!config.is_null()) d.config = simulation_config_from_json(config);
  const auto axis = d.ppm_grid();
  if (doubles(require(j, "ppm_grid", ""), "ppm_grid") != axis) {
    throw FormatError("ppm_grid does not match the acquisition parameters");
  }
  const Json& records = require(j, "records", "");
  if (!records.is_array()) throw FormatError("records: expected an array");
  if (j.contains("record_count") &&
      as_size(j["record_count"], "record_count") != records.size()) {
    throw FormatError("record_count says " + j["record_count"].dump() + " but " +
                      std::to_string(records.size()) + " records are present");
  }
  d.records.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = "records[" + std::to_string(i) + "]";
    const Json& r = records[i];
    LabeledSpectrum& out = d.records[i];
    const Json& labels = require(r, "labels", path);
    if (!labels.is_object()) throw FormatError(path + ".labels: expected an object");
    for (const auto& [name, value] : labels.items()) {
      out.labels[name] = number_or_nan(value, path + ".labels." + name);
    }
    out.truth = record_truth_from_json(require(r, "truth", path), path + ".truth");
    try {
      out.spectrum.values =
          decode_complex(as<std::string>(require(r, "spectrum", path), path + ".spectrum"));
    } catch (const FormatError& e) {
      throw FormatError(path + ".spectrum: " + e.what());
    }
    if (out.spectrum.values.size() != d.params.n_points) {
      throw FormatError(path + ".spectrum: " + std::to_string(out.spectrum.values.size()) +
                        " bins, expected " + std::to_string(d.params.n_points));
    }
    out.spectrum.ppm = axis;
    out.spectrum.params = d.params;
    out.spectrum.reference_ppm = d.reference_ppm;
  }
  return d;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_text(path, serialize_dataset(dataset));
}

Dataset load_dataset(const std::filesystem::path& path) {
  try {
    return deserialize_dataset(read_text(path));
  } catch (const UnsupportedVersionError& e) {
    throw UnsupportedVersionError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string serialize_model(const RandomForestModel& m) {
  Json ensembles = Json::array();
  for (const auto& e : m.ensembles) {
    Json trees = Json::array();
    for (const auto& t : e.trees) trees.push_back(tree_to_json(t));
    ensembles.push_back({{"target", e.target},
                         {"oob_error", e.oob_error},
                         {"oob_curve", e.oob_curve},
                         {"trees", trees}});
  }
  const Json provenance = {{"forest", to_json(m.config)},
                           {"training", m.training_fingerprint}};
  const Json j = {{"format", kModelFormat},
                  {"version", kFormatVersion},
                  {"fingerprint", fingerprint(m.config.rng_seed, provenance)},
                  {"config", to_json(m.config)},
                  {"training_fingerprint", m.training_fingerprint},
                  {"target_names", m.target_names},
                  {"feature_count", m.feature_count},
                  {"pipeline", to_json(m.pipeline)},
                  {"ensembles", ensembles}};
  return j.dump() + "\n";
}

RandomForestModel deserialize_model(std::string_view text) {
  const Json j = parse_text(text, "model");
  check_header(j, kModelFormat, "model");
  RandomForestModel m;
  m.config = forest_config_from_json(require(j, "config", ""));
  m.training_fingerprint =
      as<std::string>(require(j, "training_fingerprint", ""), "training_fingerprint");
  m.target_names =
      as<std::vector<std::string>>(require(j, "target_names", ""), "target_names");
  m.feature_count = as_size(require(j, "feature_count", ""), "feature_count");
  m.pipeline = pipeline_from_json(require(j, "pipeline", ""));
  try {
    m.config.validate(m.feature_count);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (m.target_names.empty()) throw FormatError("target_names: empty");
  if (m.pipeline.grid.size() != m.feature_count) {
    throw FormatError("pipeline.grid has " + std::to_string(m.pipeline.grid.size()) +
                      " points, feature_count is " + std::to_string(m.feature_count));
  }
  const Json& ensembles = require(j, "ensembles", "");
  if (!ensembles.is_array() || ensembles.size() != m.target_names.size()) {
    throw FormatError("ensembles: expected one entry per target");
  }
  for (std::size_t i = 0; i < ensembles.size(); ++i) {
    const std::string path = "ensembles[" + std::to_string(i) + "]";
    const Json& e = ensembles[i];
    TargetEnsemble out;
    out.target = as<std::string>(require(e, "target", path), path + ".target");
    if (out.target != m.target_names[i]) {
      throw FormatError(path + ".target: '" + out.target + "' does not match target_names");
    }
    out.oob_error = number_or_nan(require(e, "oob_error", path), path + ".oob_error");
    out.oob_curve = doubles(require(e, "oob_curve", path), path + ".oob_curve");
    const Json& trees = require(e, "trees", path);
    if (!trees.is_array() || trees.size() != m.config.n_trees) {
      throw FormatError(path + ".trees: expected " + std::to_string(m.config.n_trees) +
                        " trees");
    }
    for (std::size_t t = 0; t < trees.size(); ++t) {
      const std::string tpath = path + ".trees[" + std::to_string(t) + "]";
      RegressionTree tree = tree_from_json(trees[t], tpath);
      try {
        tree.validate(m.feature_count);
      } catch (const FormatError& err) {
        throw FormatError(tpath + ": " + err.what());
      }
      out.trees.push_back(std::move(tree));
    }
    m.ensembles.push_back(std::move(out));
  }
  return m;
}

void save_model(const RandomForestModel& model, const std::filesystem::path& path) {
  write_text(path, serialize_model(model));
}

RandomForestModel load_model(const std::filesystem::path& path) {
  try {
    return deserialize_model(read_text(path));
  } catch (const UnsupportedVersionError& e) {
    throw UnsupportedVersionError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string serialize_report(const EvalReport& report) {
  return to_json(report).dump(1) + "\n";
}

EvalReport deserialize_report(std::string_view text) {
  return report_from_json(parse_text(text, "report"));
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  write_text(path, serialize_report(report));
}

EvalReport load_report(const std::filesystem::path& path) {
  try {
    return deserialize_report(read_text(path));
  } catch (const UnsupportedVersionError& e) {
    throw UnsupportedVersionError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// --- CSV -------------------------------------------------------------------

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string oob_curve_csv(const RandomForestModel& model) {
  std::string out = "target,n_trees,oob_error\r\n";
  for (const auto& e : model.ensembles) {
    for (std::size_t m = 0; m < e.oob_curve.size(); ++m) {
      out += csv_field(e.target) + "," + std::to_string(m + 1) + "," +
             format_double(e.oob_curve[m]) + "\r\n";
    }
  }
  return out;
}

std::string errors_csv(const EvalReport& report) {
  std::string out = "sample,target,method,estimate,truth,error\r\n";
  for (const auto& t : report.targets) {
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
      const std::string prefix = std::to_string(t.samples[k]) + "," + csv_field(t.target);
      out += prefix + ",forest," + format_double(t.forest_estimates[k]) + "," +
             format_double(t.truths[k]) + "," + format_double(t.forest_errors[k]) + "\r\n";
      if (!t.oracle_estimates.empty()) {
        out += prefix + ",oracle," + format_double(t.oracle_estimates[k]) + "," +
               format_double(t.truths[k]) + "," + format_double(t.oracle_errors[k]) +
               "\r\n";
      }
    }
  }
  return out;
}

std::string pairs_csv(const EvalReport& report) {
  std::string out = "sample,target,truth,forest,oracle\r\n";
  for (const auto& t : report.targets) {
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
      out += std::to_string(t.samples[k]) + "," + csv_field(t.target) + "," +
             format_double(t.truths[k]) + "," + format_double(t.forest_estimates[k]) +
             "," + (t.oracle_estimates.empty() ? "" : format_double(t.oracle_estimates[k])) +
             "\r\n";
    }
  }
  return out;
}

}  // namespace mrsquant
