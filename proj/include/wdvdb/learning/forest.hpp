// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wdvdb/error.hpp"
#include "wdvdb/features/encoder.hpp"
#include "wdvdb/learning/impurity.hpp"
#include "wdvdb/learning/tree.hpp"
#include "wdvdb/util/random.hpp"

namespace wdvdb {

enum class BagMode : std::uint8_t { Partition = 0, Subsample = 1 };

/// Number of features examined per split.
struct FeaturesPerSplit {
  enum class Kind : std::uint8_t { Fixed = 0, Log2 = 1, Sqrt = 2, All = 3 };
  Kind kind = Kind::All;
  std::uint32_t count = 0;

  static FeaturesPerSplit fixed(std::uint32_t n) { return {Kind::Fixed, n}; }
  static FeaturesPerSplit log2() { return {Kind::Log2, 0}; }
  static FeaturesPerSplit sqrt() { return {Kind::Sqrt, 0}; }
  static FeaturesPerSplit all() { return {Kind::All, 0}; }

  std::size_t resolve(std::size_t d) const {
    if (d == 0) return 0;
    std::size_t n = d;
    switch (kind) {
      case Kind::Fixed: n = count; break;
      case Kind::Log2: n = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(d)))); break;
      case Kind::Sqrt: n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))); break;
      case Kind::All: n = d; break;
    }
    return std::clamp<std::size_t>(n, 1, d);
  }

  bool operator==(const FeaturesPerSplit&) const = default;
};

/// Bagged random forest. With PARTITION the training rows are shuffled and cut
/// into n_bags disjoint parts of bag_fraction each; with SUBSAMPLE every bag
/// draws its own sample of that size. Inside a bag every tree is grown on a
/// bootstrap resample of the bag.
struct ForestConfig {
  std::uint32_t n_bags = 1;
  double bag_fraction = 1.0;
  std::uint32_t trees_per_bag = 100;
  std::uint32_t max_depth = 32;
  FeaturesPerSplit features_per_split = FeaturesPerSplit::sqrt();
  Criterion criterion = Criterion::Gini;
  std::uint32_t min_samples_leaf = 1;
  BagMode bag_mode = BagMode::Partition;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_bags < 1 || trees_per_bag < 1) fail(ErrorCode::InvalidConfig, "n_bags and trees_per_bag must be positive");
    if (!(bag_fraction > 0.0 && bag_fraction <= 1.0)) fail(ErrorCode::InvalidConfig, "bag_fraction must lie in (0,1]");
    if (bag_mode == BagMode::Partition && static_cast<double>(n_bags) * bag_fraction > 1.0 + 1e-9)
      fail(ErrorCode::InvalidConfig, "n_bags * bag_fraction exceeds 1 for disjoint partitions");
    if (max_depth < 1) fail(ErrorCode::InvalidConfig, "max_depth must be at least 1");
    if (min_samples_leaf < 1) fail(ErrorCode::InvalidConfig, "min_samples_leaf must be at least 1");
    if (features_per_split.kind == FeaturesPerSplit::Kind::Fixed && features_per_split.count < 1)
      fail(ErrorCode::InvalidConfig, "features_per_split must be at least 1");
  }

  std::size_t tree_count() const { return static_cast<std::size_t>(n_bags) * trees_per_bag; }

  bool operator==(const ForestConfig&) const = default;
};

class ForestModel {
 public:
  ForestConfig config;
  std::vector<DecisionTree> trees;
  std::vector<std::string> feature_names;  // model input columns, in order
  std::optional<Encoder> encoder;          // set when trained through the feature pipeline
  std::string preset;                      // preset name, informational
  bool mil_enabled = false;

  std::size_t n_features() const noexcept { return feature_names.size(); }

  /// Mean leaf probability over all trees.
  double predict(std::span<const double> row) const {
    if (row.size() != n_features())
      fail(ErrorCode::ArityMismatch, "row has " + std::to_string(row.size()) + " columns, model expects " +
                                         std::to_string(n_features()));
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict(row);
    return trees.empty() ? 0.5 : sum / static_cast<double>(trees.size());
  }

  bool operator==(const ForestModel&) const = default;
};

inline double predict(const ForestModel& model, std::span<const double> row) { return model.predict(row); }

namespace detail {

// Row subsets of every bag, in bag order.
inline std::vector<std::vector<std::uint32_t>> make_bags(std::size_t n_rows, const ForestConfig& cfg) {
  const auto bag_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(n_rows) * cfg.bag_fraction)));
  std::vector<std::vector<std::uint32_t>> bags(cfg.n_bags);
  std::vector<std::uint32_t> all(n_rows);
  std::iota(all.begin(), all.end(), 0u);
  if (cfg.bag_mode == BagMode::Partition) {
    SplitMix64 rng(derive_seed(cfg.seed, 0xBA65ULL));
    shuffle(std::span<std::uint32_t>(all), rng);
    const bool whole = cfg.n_bags == 1 && cfg.bag_fraction >= 1.0;
    for (std::uint32_t b = 0; b < cfg.n_bags; ++b) {
      const std::size_t begin = std::min(n_rows, b * bag_size);
      const std::size_t end = whole ? n_rows : std::min(n_rows, begin + bag_size);
      bags[b].assign(all.begin() + static_cast<std::ptrdiff_t>(begin), all.begin() + static_cast<std::ptrdiff_t>(end));
    }
  } else {
    for (std::uint32_t b = 0; b < cfg.n_bags; ++b) {
      SplitMix64 rng(derive_seed(cfg.seed, 0xBA65ULL, b + 1));
      std::vector<std::uint32_t> copy = all;
      // Partial Fisher-Yates: the first bag_size entries are the sample.
      for (std::size_t i = 0; i < std::min(bag_size, n_rows); ++i) std::swap(copy[i], copy[i + rng.below(n_rows - i)]);
      copy.resize(std::min(bag_size, n_rows));
      bags[b] = std::move(copy);
    }
  }
  return bags;
}

}  // namespace detail

/// Trains the forest. Tree (b, t) uses its own random stream seeded from
/// (seed, b, t), so the model does not depend on `threads`.
inline ForestModel train_forest(const FeatureMatrix& x, std::span<const std::uint8_t> labels, const ForestConfig& cfg,
                                std::vector<std::string> feature_names = {}, unsigned threads = 1) {
  cfg.validate();
  if (x.rows() == 0 || x.cols() == 0) fail(ErrorCode::EmptyData, "training matrix is empty");
  if (labels.size() != x.rows()) fail(ErrorCode::ArityMismatch, "label count differs from row count");
  const auto positives = std::count_if(labels.begin(), labels.end(), [](std::uint8_t y) { return y != 0; });
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size())
    fail(ErrorCode::SingleClass, "training labels contain a single class");
  if (feature_names.empty()) {
    for (std::size_t c = 0; c < x.cols(); ++c) feature_names.push_back("f" + std::to_string(c));
  }
  if (feature_names.size() != x.cols()) fail(ErrorCode::ArityMismatch, "feature name count differs from columns");

  const auto bags = detail::make_bags(x.rows(), cfg);
  TreeParams params;
  params.max_depth = cfg.max_depth;
  params.features_per_split = cfg.features_per_split.resolve(x.cols());
  params.criterion = cfg.criterion;
  params.min_samples_leaf = cfg.min_samples_leaf;

  ForestModel model;
  model.config = cfg;
  model.feature_names = std::move(feature_names);
  model.trees.resize(cfg.tree_count());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    std::vector<double> weights(x.rows());
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= model.trees.size()) return;
      const std::uint32_t b = static_cast<std::uint32_t>(k / cfg.trees_per_bag);
      const std::uint32_t t = static_cast<std::uint32_t>(k % cfg.trees_per_bag);
      try {
        SplitMix64 rng(derive_seed(cfg.seed, b + 1, t + 1));
        std::fill(weights.begin(), weights.end(), 0.0);
        const auto& bag = bags[b];
        if (cfg.bootstrap) {
          for (std::size_t i = 0; i < bag.size(); ++i) weights[bag[rng.below(bag.size())]] += 1.0;
        } else {
          for (std::uint32_t r : bag) weights[r] = 1.0;
        }
        model.trees[k] = grow_tree(x, labels, weights, params, rng);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(model.trees.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return model;
}

}  // namespace wdvdb
