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

#include "mrsquant/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "mrsquant/error.hpp"
#include "mrsquant/parallel.hpp"

namespace mrsquant {
namespace {

// Mean of values known to lie in [lo, hi]; exact when they are all equal.
double bounded_mean(double sum, double count, double lo, double hi) {
  if (lo == hi) return lo;
  return std::clamp(sum / count, lo, hi);
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, const ColumnOrder* order,
              std::span<const double> y, const ForestConfig& config, Rng& rng)
      : X_(X),
        order_(order),
        y_(y),
        min_leaf_(config.min_leaf_size),
        max_depth_(config.max_depth),
        max_features_(std::min(config.max_features, X.cols())),
        rng_(rng) {}

  RegressionTree build(std::span<const std::uint16_t> counts) {
    const std::size_t rows = X_.rows();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::uint16_t c = 0; c < counts[r]; ++c) {
        idx_.push_back(static_cast<std::uint32_t>(r));
      }
    }
    const std::size_t m = idx_.size();
    if (m == 0) throw ArgumentError("fit_tree: empty sample multiset");
    tmp_.resize(m);
    goes_left_.assign(rows, 0);
    features_.resize(X_.cols());
    std::iota(features_.begin(), features_.end(), 0u);

    bool presorted = false;
    if (use_presort(m)) {
      std::optional<ColumnOrder> local;
      const ColumnOrder* order = order_;
      if (order == nullptr) order = &local.emplace(X_);
      sorted_.resize(X_.cols() * m);
      for (std::size_t f = 0; f < X_.cols(); ++f) {
        std::uint32_t* out = sorted_.data() + f * m;
        for (std::uint32_t r : order->order(f)) {
          for (std::uint16_t c = 0; c < counts[r]; ++c) *out++ = r;
        }
      }
      presorted = true;
    }

    tree_.nodes.emplace_back();
    std::vector<Work> stack{{0, 0, m, 0, presorted}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      grow(w, stack);
    }
    return std::move(tree_);
  }

 private:
  struct Work {
    std::uint32_t node;
    std::size_t begin;
    std::size_t end;
    std::size_t depth;
    bool presorted;
  };
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  // Per-node sorting costs ~max_features * n log n; keeping presorted columns
  // costs ~cols * n per level.
  bool use_presort(std::size_t n) const {
    return static_cast<double>(max_features_) * std::log2(static_cast<double>(n)) >
           2.0 * static_cast<double>(X_.cols());
  }

  void grow(const Work& w, std::vector<Work>& stack) {
    const std::size_t n = w.end - w.begin;
    double total = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = w.begin; k < w.end; ++k) {
      const double v = y_[idx_[k]];
      total += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const bool stop = n < 2 * min_leaf_ || lo == hi ||
                      (max_depth_ > 0 && w.depth >= max_depth_);
    const Split split = stop ? Split{} : find_split(w, total);
    if (split.feature < 0) {
      tree_.nodes[w.node].value =
          bounded_mean(total, static_cast<double>(n), lo, hi);
      return;
    }

    const auto f = static_cast<std::size_t>(split.feature);
    for (std::size_t k = w.begin; k < w.end; ++k) {
      const std::uint32_t r = idx_[k];
      goes_left_[r] = X_(r, f) <= split.threshold ? 1 : 0;
    }
    const std::size_t n_left = stable_partition(idx_.data(), w.begin, w.end);
    const std::size_t mid = w.begin + n_left;
    const bool left_presorted = w.presorted && use_presort(n_left);
    const bool right_presorted = w.presorted && use_presort(n - n_left);
    if (left_presorted || right_presorted) {
      const std::size_t m = idx_.size();
      for (std::size_t g = 0; g < X_.cols(); ++g) {
        stable_partition(sorted_.data() + g * m, w.begin, w.end);
      }
    }

    const auto left = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    TreeNode& node = tree_.nodes[w.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({left + 1, mid, w.end, w.depth + 1, right_presorted});
    stack.push_back({left, w.begin, mid, w.depth + 1, left_presorted});
  }

  Split find_split(const Work& w, double total) {
    const std::size_t n = w.end - w.begin;
    const std::size_t d = X_.cols();
    Split best;
    for (std::size_t k = 0; k < max_features_; ++k) {
      const std::size_t j = k + uniform_index(rng_, d - k);
      std::swap(features_[k], features_[j]);
      const std::size_t f = features_[k];
      const auto column = X_.column(f);
      if (w.presorted) {
        const std::uint32_t* rows = sorted_.data() + f * idx_.size() + w.begin;
        scan(f, n, total, best, [&](std::size_t i) { return rows[i]; },
             [&](std::size_t i) { return column[rows[i]]; });
      } else {
        pairs_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          const std::uint32_t r = idx_[w.begin + i];
          pairs_[i] = {column[r], r};
        }
        std::sort(pairs_.begin(), pairs_.end());
        scan(f, n, total, best, [&](std::size_t i) { return pairs_[i].second; },
             [&](std::size_t i) { return pairs_[i].first; });
      }
    }
    return best;
  }

  // Walks one feature in sorted order and keeps the split maximizing
  // sum_L^2/n_L + sum_R^2/n_R, i.e. minimizing the children's squared error.
  template <class RowAt, class ValueAt>
  void scan(std::size_t f, std::size_t n, double total, Split& best,
            RowAt row_at, ValueAt value_at) const {
    double sum_left = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      sum_left += y_[row_at(i)];
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (n_right < min_leaf_) break;
      if (n_left < min_leaf_) continue;
      const double a = value_at(i);
      const double b = value_at(i + 1);
      if (a == b) continue;
      const double sum_right = total - sum_left;
      const double score = sum_left * sum_left / static_cast<double>(n_left) +
                           sum_right * sum_right / static_cast<double>(n_right);
      if (score > best.score) {
        best.feature = static_cast<std::int32_t>(f);
        best.threshold = std::midpoint(a, b);
        best.score = score;
      }
    }
  }

  // Stable partition of data[begin, end) by goes_left_; returns left count.
  std::size_t stable_partition(std::uint32_t* data, std::size_t begin,
                               std::size_t end) {
    std::size_t write = begin;
    std::size_t spill = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t r = data[k];
      if (goes_left_[r]) {
        data[write++] = r;
      } else {
        tmp_[spill++] = r;
      }
    }
    std::copy(tmp_.begin(), tmp_.begin() + static_cast<std::ptrdiff_t>(spill),
              data + write);
    return write - begin;
  }

  const FeatureMatrix& X_;
  const ColumnOrder* order_;
  std::span<const double> y_;
  std::size_t min_leaf_;
  std::size_t max_depth_;
  std::size_t max_features_;
  Rng& rng_;

  RegressionTree tree_;
  std::vector<std::uint32_t> idx_;
  std::vector<std::uint32_t> tmp_;
  std::vector<std::uint32_t> sorted_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> features_;
  std::vector<std::pair<double, std::uint32_t>> pairs_;
};

std::vector<std::uint16_t> counts_from_indices(
    std::size_t rows, std::span<const std::uint32_t> sample_indices) {
  std::vector<std::uint16_t> counts(rows, 0);
  for (std::uint32_t i : sample_indices) {
    if (i >= rows) {
      throw ArgumentError("fit_tree: sample index " + std::to_string(i) +
                          " out of range");
    }
    if (counts[i] == UINT16_MAX) throw ArgumentError("fit_tree: sample repeated too often");
    ++counts[i];
  }
  return counts;
}

void check_tree_inputs(const FeatureMatrix& X, std::span<const double> y,
                       std::span<const std::uint32_t> sample_indices,
                       const ForestConfig& config) {
  if (X.rows() == 0 || X.cols() == 0) throw ArgumentError("fit_tree: empty feature matrix");
  if (y.size() != X.rows()) {
    throw ArgumentError("fit_tree: " + std::to_string(y.size()) + " targets for " +
                        std::to_string(X.rows()) + " rows");
  }
  if (sample_indices.empty()) throw ArgumentError("fit_tree: empty sample multiset");
  config.validate(X.cols());
}

}  // namespace

void ForestConfig::validate(std::size_t n_features) const {
  if (n_trees < 1) throw ArgumentError("forest.n_trees must be >= 1");
  if (max_features < 1) throw ArgumentError("forest.max_features must be >= 1");
  if (n_features > 0 && max_features > n_features) {
    throw ArgumentError("forest.max_features " + std::to_string(max_features) +
                        " exceeds the feature dimension " +
                        std::to_string(n_features));
  }
  if (min_leaf_size < 1) throw ArgumentError("forest.min_leaf_size must be >= 1");
}

FeatureMatrix FeatureMatrix::from_rows(std::span<const std::vector<double>> rows) {
  if (rows.empty()) return {};
  FeatureMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw ArgumentError("feature row " + std::to_string(r) + " has length " +
                          std::to_string(rows[r].size()) + ", expected " +
                          std::to_string(m.cols()));
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
  return out;
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

double RegressionTree::predict_row(const FeatureMatrix& X, std::size_t row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = X(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left
                                                                    : n.right;
  }
  return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void RegressionTree::validate(std::size_t n_features) const {
  if (nodes.empty()) throw FormatError("tree has no nodes");
  std::vector<int> parents(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      if (!std::isfinite(n.value)) {
        throw FormatError("leaf " + std::to_string(i) + " has a non-finite value");
      }
      continue;
    }
    if (static_cast<std::size_t>(n.feature) >= n_features) {
      throw FormatError("node " + std::to_string(i) + " splits on feature " +
                        std::to_string(n.feature) + " of " +
                        std::to_string(n_features));
    }
    for (std::uint32_t child : {n.left, n.right}) {
      if (child <= i || child >= nodes.size()) {
        throw FormatError("node " + std::to_string(i) + " has invalid child " +
                          std::to_string(child));
      }
      ++parents[child];
    }
    if (n.left == n.right) {
      throw FormatError("node " + std::to_string(i) + " has identical children");
    }
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (parents[i] != 1) {
      throw FormatError("node " + std::to_string(i) + " has " +
                        std::to_string(parents[i]) + " parents");
    }
  }
}

ColumnOrder::ColumnOrder(const FeatureMatrix& X)
    : rows_(X.rows()), order_(X.rows() * X.cols()) {
  for (std::size_t f = 0; f < X.cols(); ++f) {
    auto* begin = order_.data() + f * rows_;
    auto* end = begin + rows_;
    std::iota(begin, end, 0u);
    const auto column = X.column(f);
    std::stable_sort(begin, end, [&](std::uint32_t a, std::uint32_t b) {
      return column[a] < column[b];
    });
  }
}

RegressionTree fit_tree(const FeatureMatrix& X, std::span<const double> y,
                        std::span<const std::uint32_t> sample_indices,
                        const ForestConfig& config, Rng& rng) {
  check_tree_inputs(X, y, sample_indices, config);
  const auto counts = counts_from_indices(X.rows(), sample_indices);
  return TreeBuilder(X, nullptr, y, config, rng).build(counts);
}

RegressionTree fit_tree(const FeatureMatrix& X, const ColumnOrder& order,
                        std::span<const double> y,
                        std::span<const std::uint32_t> sample_indices,
                        const ForestConfig& config, Rng& rng) {
  check_tree_inputs(X, y, sample_indices, config);
  const auto counts = counts_from_indices(X.rows(), sample_indices);
  return TreeBuilder(X, &order, y, config, rng).build(counts);
}

std::vector<std::uint16_t> bootstrap_counts(std::size_t n, BootstrapMode mode,
                                            Rng& rng) {
  if (mode == BootstrapMode::kIdentity) return std::vector<std::uint16_t>(n, 1);
  std::vector<std::uint16_t> counts(n, 0);
  for (std::size_t k = 0; k < n; ++k) ++counts[uniform_index(rng, n)];
  return counts;
}

std::vector<double> oob_error_curve(
    std::span<const RegressionTree> trees,
    const std::vector<std::vector<std::uint16_t>>& in_bag,
    const FeatureMatrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  std::vector<double> sum(n, 0.0);
  std::vector<double> covered(n, 0.0);
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  std::vector<double> curve;
  curve.reserve(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[t][i] != 0) continue;
      const double p = trees[t].predict_row(X, i);
      sum[i] += p;
      covered[i] += 1.0;
      lo[i] = std::min(lo[i], p);
      hi[i] = std::max(hi[i], p);
    }
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (covered[i] == 0.0 || y[i] == 0.0) continue;
      const double estimate = bounded_mean(sum[i], covered[i], lo[i], hi[i]);
      total += std::abs(estimate - y[i]) / std::abs(y[i]);
      ++counted;
    }
    curve.push_back(counted > 0 ? total / static_cast<double>(counted)
                                : std::numeric_limits<double>::quiet_NaN());
  }
  return curve;
}

double TargetEnsemble::predict(std::span<const double> x) const {
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& tree : trees) {
    const double p = tree.predict(x);
    sum += p;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return bounded_mean(sum, static_cast<double>(trees.size()), lo, hi);
}

const TargetEnsemble& RandomForestModel::ensemble(const std::string& target) const {
  for (const auto& e : ensembles) {
    if (e.target == target) return e;
  }
  throw LookupError("model has no target '" + target + "'");
}

std::map<std::string, double> RandomForestModel::predict(
    std::span<const double> x) const {
  if (x.size() != feature_count) {
    throw ArgumentError("feature vector has length " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(feature_count));
  }
  std::map<std::string, double> out;
  for (const auto& e : ensembles) out[e.target] = e.predict(x);
  return out;
}

RandomForestModel RandomForestModel::truncated(std::size_t n_trees) const {
  RandomForestModel copy = *this;
  copy.config.n_trees = std::min(n_trees, config.n_trees);
  for (auto& e : copy.ensembles) {
    if (e.trees.size() > copy.config.n_trees) e.trees.resize(copy.config.n_trees);
    if (e.oob_curve.size() > copy.config.n_trees) {
      e.oob_curve.resize(copy.config.n_trees);
    }
    if (!e.oob_curve.empty()) e.oob_error = e.oob_curve.back();
  }
  return copy;
}

RandomForestModel fit_forest(const FeatureMatrix& X,
                             const std::vector<std::vector<double>>& Y,
                             const std::vector<std::string>& target_names,
                             const ForestConfig& config, unsigned threads) {
  const std::size_t n = X.rows();
  if (n < 2) throw ArgumentError("fit_forest needs at least two rows");
  if (target_names.empty()) throw ArgumentError("fit_forest needs at least one target");
  if (Y.size() != target_names.size()) {
    throw ArgumentError("fit_forest: " + std::to_string(Y.size()) +
                        " target columns for " + std::to_string(target_names.size()) +
                        " names");
  }
  for (std::size_t t = 0; t < Y.size(); ++t) {
    if (Y[t].size() != n) {
      throw ArgumentError("fit_forest: target '" + target_names[t] + "' has " +
                          std::to_string(Y[t].size()) + " rows, features have " +
                          std::to_string(n));
    }
  }
  config.validate(X.cols());

  // Canonical row order: lexicographic on features, then targets.
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    for (std::size_t c = 0; c < X.cols(); ++c) {
      if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
    }
    for (const auto& column : Y) {
      if (column[a] != column[b]) return column[a] < column[b];
    }
    return false;
  });
  FeatureMatrix Xc(n, X.cols());
  std::vector<std::vector<double>> Yc(Y.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < X.cols(); ++c) Xc(i, c) = X(perm[i], c);
    for (std::size_t t = 0; t < Y.size(); ++t) Yc[t][i] = Y[t][perm[i]];
  }
  const ColumnOrder order(Xc);

  const std::size_t n_targets = target_names.size();
  const std::size_t n_trees = config.n_trees;
  std::vector<RegressionTree> trees(n_targets * n_trees);
  std::vector<std::vector<std::uint16_t>> in_bag(n_targets * n_trees);
  parallel_for(trees.size(), threads, [&](std::size_t job) {
    const std::size_t t = job / n_trees;
    const std::size_t k = job % n_trees;
    Rng boot = derive_stream(config.rng_seed, StreamTag::kBootstrap, t, k);
    Rng splits = derive_stream(config.rng_seed, StreamTag::kTreeSplits, t, k);
    in_bag[job] = bootstrap_counts(n, config.bootstrap, boot);
    trees[job] = TreeBuilder(Xc, &order, Yc[t], config, splits).build(in_bag[job]);
  });

  RandomForestModel model;
  model.config = config;
  model.target_names = target_names;
  model.feature_count = X.cols();
  model.ensembles.resize(n_targets);
  parallel_for(n_targets, threads, [&](std::size_t t) {
    auto& e = model.ensembles[t];
    e.target = target_names[t];
    const auto first = trees.begin() + static_cast<std::ptrdiff_t>(t * n_trees);
    e.trees.assign(std::make_move_iterator(first),
                   std::make_move_iterator(first + static_cast<std::ptrdiff_t>(n_trees)));
    std::vector<std::vector<std::uint16_t>> bags(
        in_bag.begin() + static_cast<std::ptrdiff_t>(t * n_trees),
        in_bag.begin() + static_cast<std::ptrdiff_t>((t + 1) * n_trees));
    e.oob_curve = oob_error_curve(e.trees, bags, Xc, Yc[t]);
    e.oob_error = e.oob_curve.back();
  });
  return model;
}

}  // namespace mrsquant
