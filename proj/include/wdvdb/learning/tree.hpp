// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "wdvdb/error.hpp"
#include "wdvdb/learning/impurity.hpp"
#include "wdvdb/util/binary.hpp"
#include "wdvdb/util/random.hpp"

namespace wdvdb {

/// Dense column-major matrix; NaN marks a missing value.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static FeatureMatrix from_rows(std::span<const std::vector<double>> rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    FeatureMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) fail(ErrorCode::ArityMismatch, "ragged feature rows");
      for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }
  double& at(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const noexcept { return {data_.data() + c * rows_, rows_}; }

  std::vector<double> row(std::size_t r) const {
    std::vector<double> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = at(r, c);
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A split "x <= threshold goes left"; rows missing x go left iff missing_left.
/// A threshold of +inf separates present values (left) from missing ones.
struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  bool missing_left = true;
  double gain = 0.0;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool missing_left = true;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;             // Laplace-smoothed vandalism probability
  std::uint32_t depth = 0;
  std::uint32_t candidates = 0;   // non-constant features examined when splitting
  double weight = 0.0;            // bootstrap weight reaching the node

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }

  template <typename Row>
  const TreeNode& leaf_for(const Row& row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const TreeNode& n = nodes_[i];
      const double x = row[static_cast<std::size_t>(n.feature)];
      const bool left = std::isnan(x) ? n.missing_left : x <= n.threshold;
      i = static_cast<std::size_t>(left ? n.left : n.right);
    }
    return nodes_[i];
  }

  template <typename Row>
  double predict(const Row& row) const {
    return leaf_for(row).value;
  }

  std::uint32_t depth() const noexcept {
    std::uint32_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
  }

  void write(ByteWriter& w) const {
    w.u64(nodes_.size());
    for (const auto& n : nodes_) {
      w.i32(n.feature);
      w.f64(n.threshold);
      w.u8(n.missing_left ? 1 : 0);
      w.i32(n.left);
      w.i32(n.right);
      w.f64(n.value);
      w.u32(n.depth);
      w.u32(n.candidates);
      w.f64(n.weight);
    }
  }

  static DecisionTree read(ByteReader& r, std::size_t n_features) {
    const std::size_t n = r.count(45);
    std::vector<TreeNode> nodes(n);
    for (auto& node : nodes) {
      node.feature = r.i32();
      node.threshold = r.f64();
      node.missing_left = r.u8() != 0;
      node.left = r.i32();
      node.right = r.i32();
      node.value = r.f64();
      node.depth = r.u32();
      node.candidates = r.u32();
      node.weight = r.f64();
    }
    // Children must point forward so traversal always terminates.
    for (std::size_t i = 0; i < n; ++i) {
      const TreeNode& node = nodes[i];
      if (node.is_leaf()) continue;
      const auto ok = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && static_cast<std::size_t>(c) < n; };
      if (static_cast<std::size_t>(node.feature) >= n_features || !ok(node.left) || !ok(node.right))
        ByteReader::corrupt("tree structure is invalid");
    }
    if (n == 0) ByteReader::corrupt("empty tree");
    return DecisionTree(std::move(nodes));
  }

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Growth parameters of a single tree.
struct TreeParams {
  std::uint32_t max_depth = 32;
  std::size_t features_per_split = 0;  // 0 means all features
  Criterion criterion = Criterion::Gini;
  double min_samples_leaf = 1.0;
};

namespace detail {

inline constexpr double kGainTolerance = 1e-12;

struct SplitEntry {
  double value;
  double neg;
  double pos;
};

// Whether `c` should replace `best` under (gain, lower feature, lower threshold).
inline bool better_split(const SplitCandidate& c, const std::optional<SplitCandidate>& best) {
  if (!best) return true;
  if (c.gain > best->gain + kGainTolerance) return true;
  if (c.gain < best->gain - kGainTolerance) return false;
  if (c.feature != best->feature) return c.feature < best->feature;
  return c.threshold < best->threshold;
}

struct FeatureScan {
  bool constant = true;
  std::optional<SplitCandidate> best;
};

// Best split of one feature over the node rows.
inline FeatureScan scan_feature(std::span<const double> column, std::span<const std::uint32_t> rows,
                                std::span<const std::uint8_t> labels, std::span<const double> weights,
                                std::size_t feature, const TreeParams& params, std::vector<SplitEntry>& scratch) {
  FeatureScan out;
  scratch.clear();
  double miss_neg = 0, miss_pos = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::uint32_t r : rows) {
    const double x = column[r];
    const double w = weights.empty() ? 1.0 : weights[r];
    const double pos = labels[r] ? w : 0.0;
    const double neg = w - pos;
    if (std::isnan(x)) {
      miss_neg += neg;
      miss_pos += pos;
    } else {
      scratch.push_back({x, neg, pos});
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  const bool has_missing = miss_neg + miss_pos > 0;
  const bool has_present = !scratch.empty();
  out.constant = !(has_present && (lo < hi || has_missing));
  if (out.constant) return out;

  double pres_neg = 0, pres_pos = 0;
  for (const auto& e : scratch) {
    pres_neg += e.neg;
    pres_pos += e.pos;
  }
  const double tot_neg = pres_neg + miss_neg, tot_pos = pres_pos + miss_pos;
  const double total = tot_neg + tot_pos;
  const double parent = impurity2(tot_neg, tot_pos, params.criterion);

  const auto consider = [&](double threshold, bool missing_left, double ln, double lp) {
    const double rn = tot_neg - ln, rp = tot_pos - lp;
    const double wl = ln + lp, wr = rn + rp;
    if (wl < params.min_samples_leaf || wr < params.min_samples_leaf || wl <= 0 || wr <= 0) return;
    const double gain = parent - (wl / total) * impurity2(ln, lp, params.criterion) -
                        (wr / total) * impurity2(rn, rp, params.criterion);
    if (!(gain > kGainTolerance)) return;
    const SplitCandidate c{feature, threshold, missing_left, gain};
    if (!out.best || gain > out.best->gain + kGainTolerance) out.best = c;
  };

  std::sort(scratch.begin(), scratch.end(), [](const SplitEntry& a, const SplitEntry& b) { return a.value < b.value; });
  double ln = 0, lp = 0;
  for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
    ln += scratch[i].neg;
    lp += scratch[i].pos;
    const double a = scratch[i].value, b = scratch[i + 1].value;
    if (!(a < b)) continue;
    double mid = a + (b - a) / 2.0;
    if (!(mid < b)) mid = a;
    consider(mid, true, ln + miss_neg, lp + miss_pos);
    if (has_missing) consider(mid, false, ln, lp);
  }
  if (has_missing && has_present) consider(std::numeric_limits<double>::infinity(), false, pres_neg, pres_pos);
  return out;
}

}  // namespace detail

/// Exhaustive CART split search over `candidate_features` with unit weights.
inline std::optional<SplitCandidate> best_split(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                                                std::span<const std::size_t> candidate_features,
                                                Criterion criterion, double min_samples_leaf = 1.0) {
  if (x.rows() < 2) return std::nullopt;
  std::vector<std::uint32_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0u);
  TreeParams params;
  params.criterion = criterion;
  params.min_samples_leaf = min_samples_leaf;
  std::vector<detail::SplitEntry> scratch;
  std::optional<SplitCandidate> best;
  for (std::size_t f : candidate_features) {
    const auto scan = detail::scan_feature(x.column(f), rows, labels, {}, f, params, scratch);
    if (scan.best && detail::better_split(*scan.best, best)) best = scan.best;
  }
  return best;
}

/// Grows one tree on the rows with positive weight. Per node, features are
/// visited in random order until `features_per_split` non-constant ones have
/// been examined.
inline DecisionTree grow_tree(const FeatureMatrix& x, std::span<const std::uint8_t> labels,
                              std::span<const double> weights, const TreeParams& params, SplitMix64& rng) {
  std::vector<std::uint32_t> rows;
  rows.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    if (weights[r] > 0) rows.push_back(static_cast<std::uint32_t>(r));

  const std::size_t d = x.cols();
  const std::size_t mtry = params.features_per_split == 0 ? d : std::min(params.features_per_split, d);
  std::vector<TreeNode> nodes;
  std::vector<detail::SplitEntry> scratch;
  std::vector<std::size_t> perm(d);

  struct Task {
    std::size_t node;
    std::size_t begin, end;
  };
  std::vector<Task> stack;
  nodes.push_back(TreeNode{});
  stack.push_back({0, 0, rows.size()});

  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    const std::span<std::uint32_t> node_rows(rows.data() + t.begin, t.end - t.begin);
    double neg = 0, pos = 0;
    for (std::uint32_t r : node_rows) (labels[r] ? pos : neg) += weights[r];
    TreeNode& node = nodes[t.node];
    node.weight = neg + pos;
    node.value = (pos + 1.0) / (neg + pos + 2.0);

    if (node.depth >= params.max_depth || neg == 0 || pos == 0 || node.weight < 2 * params.min_samples_leaf) continue;

    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::optional<SplitCandidate> best;
    std::uint32_t examined = 0;
    for (std::size_t i = 0; i < d && examined < mtry; ++i) {
      const std::size_t j = i + rng.below(d - i);
      std::swap(perm[i], perm[j]);
      const std::size_t f = perm[i];
      const auto scan = detail::scan_feature(x.column(f), node_rows, labels, weights, f, params, scratch);
      if (scan.constant) continue;
      ++examined;
      if (scan.best && detail::better_split(*scan.best, best)) best = scan.best;
    }
    nodes[t.node].candidates = examined;
    if (!best) continue;

    const std::span<const double> col = x.column(best->feature);
    const auto goes_left = [&](std::uint32_t r) {
      const double v = col[r];
      return std::isnan(v) ? best->missing_left : v <= best->threshold;
    };
    const auto mid = std::stable_partition(node_rows.begin(), node_rows.end(), goes_left);
    const std::size_t split = t.begin + static_cast<std::size_t>(mid - node_rows.begin());

    const auto left = static_cast<std::int32_t>(nodes.size());
    const std::uint32_t child_depth = nodes[t.node].depth + 1;
    nodes.push_back(TreeNode{});
    nodes.push_back(TreeNode{});
    nodes[static_cast<std::size_t>(left)].depth = child_depth;
    nodes[static_cast<std::size_t>(left) + 1].depth = child_depth;
    TreeNode& parent = nodes[t.node];
    parent.feature = static_cast<std::int32_t>(best->feature);
    parent.threshold = best->threshold;
    parent.missing_left = best->missing_left;
    parent.left = left;
    parent.right = left + 1;
    stack.push_back({static_cast<std::size_t>(left) + 1, split, t.end});
    stack.push_back({static_cast<std::size_t>(left), t.begin, split});
  }
  return DecisionTree(std::move(nodes));
}

}  // namespace wdvdb
