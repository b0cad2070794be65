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

// Random forest regression: bootstrap-aggregated CART trees with per-split
// feature subsampling, one independent ensemble per target, and out-of-bag
// error curves.

#ifndef MRSQUANT_FOREST_HPP_
#define MRSQUANT_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mrsquant/preprocess.hpp"
#include "mrsquant/random.hpp"

namespace mrsquant {

enum class BootstrapMode {
  kResample,  // n draws with replacement
  kIdentity,  // every sample exactly once; test hook for memorization checks
};

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_features = 64;
  std::size_t min_leaf_size = 5;
  // 0 means unlimited.
  std::size_t max_depth = 0;
  std::uint64_t rng_seed = 0;
  BootstrapMode bootstrap = BootstrapMode::kResample;

  // max_features is checked against the feature dimension when known.
  void validate(std::size_t n_features = 0) const;
  bool operator==(const ForestConfig&) const = default;
};

// Dense rows x cols matrix stored column by column, so a split search reads
// one contiguous column.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static FeatureMatrix from_rows(std::span<const std::vector<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[c * rows_ + r];
  }
  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const {
    return {data_.data() + c * rows_, rows_};
  }
  std::vector<double> row(std::size_t r) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TreeNode {
  // -1 marks a leaf.
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  // Mean training target of the leaf; unused for internal nodes.
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Flat node array, root at 0. Children always have larger indices than their
// parent. Samples with x[feature] <= threshold go left.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  double predict_row(const FeatureMatrix& X, std::size_t row) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;
  // Structural check for deserialized trees; throws FormatError.
  void validate(std::size_t n_features) const;

  bool operator==(const RegressionTree&) const = default;
};

// Per-feature row order by (value, row). Shared by every tree grown on the
// same matrix.
class ColumnOrder {
 public:
  explicit ColumnOrder(const FeatureMatrix& X);
  std::span<const std::uint32_t> order(std::size_t feature) const {
    return {order_.data() + feature * rows_, rows_};
  }

 private:
  std::size_t rows_;
  std::vector<std::uint32_t> order_;
};

// Greedy CART on the multiset `sample_indices` (rows of X, duplicates allowed).
RegressionTree fit_tree(const FeatureMatrix& X, std::span<const double> y,
                        std::span<const std::uint32_t> sample_indices,
                        const ForestConfig& config, Rng& rng);
RegressionTree fit_tree(const FeatureMatrix& X, const ColumnOrder& order,
                        std::span<const double> y,
                        std::span<const std::uint32_t> sample_indices,
                        const ForestConfig& config, Rng& rng);

struct TargetEnsemble {
  std::string target;
  std::vector<RegressionTree> trees;
  // oob_curve[m - 1] is the OOB error of the first m trees (NaN while no
  // sample is out of bag). oob_error is its last entry.
  std::vector<double> oob_curve;
  double oob_error = 0.0;

  double predict(std::span<const double> x) const;
  bool operator==(const TargetEnsemble&) const = default;
};

struct RandomForestModel {
  ForestConfig config;
  std::vector<std::string> target_names;
  std::vector<TargetEnsemble> ensembles;  // parallel to target_names
  FeaturePipeline pipeline;
  // Fingerprint of the training dataset, for provenance.
  std::string training_fingerprint;
  std::size_t feature_count = 0;

  std::size_t n_features() const { return feature_count; }
  const TargetEnsemble& ensemble(const std::string& target) const;

  // Throws ArgumentError on a length mismatch.
  std::map<std::string, double> predict(std::span<const double> x) const;
  std::map<std::string, double> predict(const FeatureVector& x) const {
    return predict(x.values);
  }
  // Keeps only the first n trees of every ensemble.
  RandomForestModel truncated(std::size_t n_trees) const;
};

// Y holds one column per target name. Rows are put into a canonical order
// first, so permuting the training rows does not change the model. Output is
// identical for any thread count.
RandomForestModel fit_forest(const FeatureMatrix& X,
                             const std::vector<std::vector<double>>& Y,
                             const std::vector<std::string>& target_names,
                             const ForestConfig& config, unsigned threads = 0);

// Mean |estimate - truth| / |truth| over samples with at least one covering
// tree (and nonzero truth), after each tree of `trees` is added.
// in_bag[t][i] is the bootstrap count of sample i in tree t.
std::vector<double> oob_error_curve(
    std::span<const RegressionTree> trees,
    const std::vector<std::vector<std::uint16_t>>& in_bag,
    const FeatureMatrix& X, std::span<const double> y);

// Bootstrap multiset for one tree, as per-sample counts.
std::vector<std::uint16_t> bootstrap_counts(std::size_t n, BootstrapMode mode,
                                            Rng& rng);

}  // namespace mrsquant

#endif  // MRSQUANT_FOREST_HPP_
