// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "support.hpp"

using namespace wdvdb;
using wdvdb::testing::code_of;
using Catch::Approx;

namespace {

double gini_oracle(double a, double b) {
  const double n = a + b;
  return 1.0 - (a / n) * (a / n) - (b / n) * (b / n);
}

double entropy_oracle(double a, double b) {
  double h = 0.0;
  for (double c : {a, b})
    if (c > 0) h -= c / (a + b) * std::log2(c / (a + b));
  return h;
}

struct OracleSplit {
  std::size_t feature;
  double threshold;
  bool missing_left;
  double gain;
};

// Every (feature, midpoint, missing side) recomputed from scratch.
std::optional<OracleSplit> exhaustive_split(const std::vector<std::vector<double>>& rows,
                                            const std::vector<std::uint8_t>& y, Criterion crit) {
  const auto imp = [&](double n0, double n1) {
    return crit == Criterion::Gini ? gini_oracle(n0, n1) : entropy_oracle(n0, n1);
  };
  const auto gain_of = [&](std::size_t f, double thr, bool miss_left) {
    double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double x = rows[i][f];
      const bool left = std::isnan(x) ? miss_left : x <= thr;
      (left ? (y[i] ? l1 : l0) : (y[i] ? r1 : r0)) += 1;
    }
    if (l0 + l1 == 0 || r0 + r1 == 0) return -1.0;
    const double n = static_cast<double>(rows.size());
    return imp(l0 + r0, l1 + r1) - (l0 + l1) / n * imp(l0, l1) - (r0 + r1) / n * imp(r0, r1);
  };
  std::optional<OracleSplit> best;
  const auto offer = [&](std::size_t f, double thr, bool ml) {
    const double g = gain_of(f, thr, ml);
    if (g <= 1e-12) return;
    if (!best || g > best->gain + 1e-12) best = OracleSplit{f, thr, ml, g};
  };
  for (std::size_t f = 0; f < rows[0].size(); ++f) {
    std::vector<double> vals;
    bool missing = false;
    for (const auto& r : rows) {
      if (std::isnan(r[f])) missing = true;
      else vals.push_back(r[f]);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      const double mid = vals[i] + (vals[i + 1] - vals[i]) / 2.0;
      offer(f, mid, true);
      if (missing) offer(f, mid, false);
    }
    if (missing && !vals.empty()) offer(f, std::numeric_limits<double>::infinity(), false);
  }
  return best;
}

FeatureMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  return FeatureMatrix::from_rows(std::span<const std::vector<double>>(rows));
}

// Two classes separated by column 0, plus noise columns.
struct Toy {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
};

Toy separable(std::size_t n, std::size_t noise, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> rows;
  Toy t;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 4 == 0;
    std::vector<double> r{pos ? 1.0 + rng.uniform() : -1.0 - rng.uniform()};
    for (std::size_t j = 0; j < noise; ++j) r.push_back(rng.uniform());
    rows.push_back(std::move(r));
    t.y.push_back(pos);
  }
  t.x = matrix_of(rows);
  return t;
}

double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] && !y[j]) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

std::vector<double> predict_all(const ForestModel& m, const FeatureMatrix& x) {
  std::vector<double> out;
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(m.predict(x.row(r)));
  return out;
}

}  // namespace

TEST_CASE("impurity") {
  const std::vector<double> even = {2, 2}, pure = {4, 0}, coin = {1, 1};
  REQUIRE(impurity(even, Criterion::Gini) == 0.5);
  REQUIRE(impurity(coin, Criterion::Entropy) == 1.0);
  REQUIRE(impurity(pure, Criterion::Gini) == 0.0);
  REQUIRE(impurity(pure, Criterion::Entropy) == 0.0);
  const std::vector<double> three = {1, 2, 3};
  REQUIRE(impurity(three, Criterion::Gini) == Approx(1.0 - (1.0 + 4.0 + 9.0) / 36.0));
  const std::vector<double> empty = {0, 0};
  REQUIRE(code_of([&] { impurity(empty, Criterion::Gini); }) == ErrorCode::EmptyCounts);

  SplitMix64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const double a = static_cast<double>(rng.below(50)), b = static_cast<double>(rng.below(50) + 1);
    const std::vector<double> c = {a, b};
    REQUIRE(impurity(c, Criterion::Gini) == Approx(gini_oracle(a, b)).margin(1e-15));
    REQUIRE(impurity(c, Criterion::Entropy) == Approx(entropy_oracle(a, b)).margin(1e-15));
  }
}

TEST_CASE("best_split examples") {
  const auto x = matrix_of({{1}, {2}, {3}, {4}});
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  const std::vector<std::size_t> f0 = {0};
  const auto s = best_split(x, y, f0, Criterion::Gini);
  REQUIRE(s);
  REQUIRE(s->threshold == 2.5);
  REQUIRE(s->gain == Approx(0.5));

  const auto constant = matrix_of({{7}, {7}, {7}});
  const std::vector<std::uint8_t> y3 = {0, 1, 1};
  REQUIRE_FALSE(best_split(constant, y3, f0, Criterion::Gini));
  const std::vector<std::uint8_t> pure = {1, 1, 1, 1};
  REQUIRE_FALSE(best_split(x, pure, f0, Criterion::Gini));
}

TEST_CASE("best_split agrees with exhaustive enumeration") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng.below(25), d = 1 + rng.below(4);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.chance(0.4);
      for (std::size_t j = 0; j < d; ++j)
        rows[i][j] = rng.chance(0.15) ? kMissing : static_cast<double>(rng.below(6));
    }
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto crit = trial % 2 ? Criterion::Entropy : Criterion::Gini;
    const auto got = best_split(matrix_of(rows), y, all, crit);
    const auto want = exhaustive_split(rows, y, crit);
    INFO("trial " << trial);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    REQUIRE(got->feature == want->feature);
    REQUIRE(got->threshold == want->threshold);
    REQUIRE(got->missing_left == want->missing_left);
    REQUIRE(got->gain == Approx(want->gain).margin(1e-12));
  }
}

TEST_CASE("root split picks the separating feature") {
  const Toy t = separable(200, 5, 8);
  std::vector<std::size_t> all(t.x.cols());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto s = best_split(t.x, t.y, all, Criterion::Gini);
  REQUIRE(s);
  REQUIRE(s->feature == 0);
}

TEST_CASE("forest rejects degenerate training data") {
  const Toy t = separable(40, 1, 1);
  const std::vector<std::uint8_t> ones(40, 1);
  ForestConfig cfg;
  cfg.trees_per_bag = 3;
  REQUIRE(code_of([&] { train_forest(t.x, ones, cfg); }) == ErrorCode::SingleClass);
  REQUIRE(code_of([&] { train_forest(FeatureMatrix(0, 3), {}, cfg); }) == ErrorCode::EmptyData);
  cfg.n_bags = 4;
  cfg.bag_fraction = 0.5;
  REQUIRE(code_of([&] { train_forest(t.x, t.y, cfg); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("WDVD preset separates a separable toy set") {
  const Toy t = separable(200, 2, 5);
  const ForestConfig cfg = presets::wdvd(11).forest;
  const ForestModel m = train_forest(t.x, t.y, cfg);
  REQUIRE(m.trees.size() == 128);
  const auto scores = predict_all(m, t.x);
  REQUIRE(roc_auc(scores, t.y) == 1.0);
  REQUIRE(pairwise_auc(scores, t.y) == 1.0);
}

TEST_CASE("training is deterministic and independent of thread count") {
  const Toy t = separable(600, 6, 21);
  ForestConfig cfg;
  cfg.n_bags = 4;
  cfg.bag_fraction = 0.25;
  cfg.trees_per_bag = 5;
  cfg.features_per_split = FeaturesPerSplit::fixed(2);
  cfg.seed = 77;
  const std::string one = serialize_model(train_forest(t.x, t.y, cfg, {}, 1));
  REQUIRE(serialize_model(train_forest(t.x, t.y, cfg, {}, 1)) == one);
  REQUIRE(serialize_model(train_forest(t.x, t.y, cfg, {}, 4)) == one);
  cfg.seed = 78;
  REQUIRE(serialize_model(train_forest(t.x, t.y, cfg, {}, 1)) != one);
}

TEST_CASE("partition bags are disjoint and cover the requested share") {
  ForestConfig cfg;
  cfg.n_bags = 16;
  cfg.bag_fraction = 1.0 / 16;
  cfg.seed = 4;
  const auto bags = detail::make_bags(1600, cfg);
  std::vector<int> seen(1600);
  for (const auto& b : bags) {
    REQUIRE(b.size() == 100);
    for (auto r : b) ++seen[r];
  }
  for (int c : seen) REQUIRE(c == 1);
}

TEST_CASE("trees respect the depth and leaf-size limits on every path") {
  const auto g = wdvdb::testing::small_corpus(2000, 31, 0.1);
  const auto vectors = extract_all(g.revisions);
  Encoder enc;
  for (const auto& v : vectors) enc.observe(v);
  enc.freeze();
  FeatureMatrix x(vectors.size(), enc.width());
  std::vector<std::uint8_t> y;
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    const auto row = enc.encode(vectors[r]);
    for (std::size_t c = 0; c < row.size(); ++c) x.at(r, c) = row[c];
    y.push_back(g.truth[r].is_vandalism);
  }
  for (std::uint32_t min_leaf : {1u, 5u}) {
    ForestConfig cfg;
    cfg.trees_per_bag = 6;
    cfg.max_depth = 6;
    cfg.min_samples_leaf = min_leaf;
    cfg.seed = 2;
    const ForestModel m = train_forest(x, y, cfg);
    for (const auto& tree : m.trees) {
      const auto nodes = tree.nodes();
      REQUIRE(tree.depth() <= 6);
      for (const auto& n : nodes) {
        REQUIRE(n.value > 0.0);
        REQUIRE(n.value < 1.0);
        if (n.is_leaf()) {
          REQUIRE(n.weight >= min_leaf);
          continue;
        }
        const auto& l = nodes[static_cast<std::size_t>(n.left)];
        const auto& r = nodes[static_cast<std::size_t>(n.right)];
        REQUIRE(l.depth == n.depth + 1);
        REQUIRE(r.depth == n.depth + 1);
        REQUIRE(l.weight + r.weight == n.weight);
      }
    }
    for (std::size_t r = 0; r < 200; ++r) {
      const auto row = x.row(r);
      const double p = m.predict(row);
      double lo = 1, hi = 0;
      for (const auto& t : m.trees) {
        lo = std::min(lo, t.predict(row));
        hi = std::max(hi, t.predict(row));
      }
      REQUIRE(p >= lo);
      REQUIRE(p <= hi);
    }
  }
}

TEST_CASE("predict averages leaves and checks arity") {
  const auto leaf = [](double v) {
    TreeNode n;
    n.value = v;
    return DecisionTree({n});
  };
  ForestModel m;
  m.feature_names = {"a", "b"};
  m.trees = {leaf(0.2), leaf(0.6)};
  const std::vector<double> row = {0.0, 1.0};
  REQUIRE(m.predict(row) == Approx(0.4));
  m.trees = {leaf(0.9)};
  REQUIRE(m.predict(row) == 0.9);
  const std::vector<double> wide(3, 0.0);
  REQUIRE(code_of([&] { m.predict(wide); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("model files round-trip and reject damage") {
  const Toy t = separable(300, 4, 3);
  ForestConfig cfg;
  cfg.trees_per_bag = 7;
  cfg.seed = 5;
  ForestModel m = train_forest(t.x, t.y, cfg);
  m.preset = "custom";
  m.mil_enabled = true;
  const auto dir = std::filesystem::temp_directory_path() / "wdvdb_test_learning";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.bin";
  save_model(m, path);
  const ForestModel back = load_model(path);
  REQUIRE(back == m);
  REQUIRE(serialize_model(back) == serialize_model(m));
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> row(t.x.cols());
    for (auto& v : row) v = rng.uniform() * 4 - 2;
    REQUIRE(back.predict(row) == m.predict(row));
  }

  const std::string bytes = serialize_model(m);
  REQUIRE(code_of([&] { deserialize_model(std::string_view(bytes).substr(0, bytes.size() - 9)); }) ==
          ErrorCode::CorruptFile);
  REQUIRE(code_of([&] { deserialize_model("not a model"); }) == ErrorCode::CorruptFile);
  std::string future = bytes;
  future[kModelMagic.size()] = static_cast<char>(kModelVersion + 1);
  REQUIRE(code_of([&] { deserialize_model(future); }) == ErrorCode::VersionMismatch);
  REQUIRE(code_of([&] { load_model(dir / "missing.bin"); }) == ErrorCode::IoFailure);
  std::filesystem::remove_all(dir);
}

TEST_CASE("session-prefix means") {
  const std::vector<std::int64_t> one = {7, 7, 7};
  const std::vector<double> raw = {0.2, 0.8, 0.5};
  const auto got = mil_prefix(one, raw);
  REQUIRE(got[0] == Approx(0.2));
  REQUIRE(got[1] == Approx(0.5));
  REQUIRE(got[2] == Approx(0.5));

  const std::vector<std::int64_t> single = {1};
  const std::vector<double> r1 = {0.3};
  REQUIRE(mil_prefix(single, r1)[0] == 0.3);

  // Interleaved sessions against an explicit prefix-mean oracle.
  SplitMix64 rng(12);
  std::vector<std::int64_t> sid;
  std::vector<double> scores;
  for (int i = 0; i < 3000; ++i) {
    sid.push_back(static_cast<std::int64_t>(rng.below(40)));
    scores.push_back(rng.uniform());
  }
  const auto out = mil_prefix(sid, scores);
  for (std::size_t i = 0; i < sid.size(); i += 37) {
    double sum = 0;
    int n = 0;
    for (std::size_t j = 0; j <= i; ++j)
      if (sid[j] == sid[i]) {
        sum += scores[j];
        ++n;
      }
    REQUIRE(out[i] == Approx(sum / n).epsilon(1e-12));
  }
}

TEST_CASE("online accumulator matches the batch prefix mean on generated sessions") {
  const auto g = wdvdb::testing::small_corpus(3000, 6);
  const auto sessions = assign_sessions(g.revisions);
  SplitMix64 rng(3);
  std::vector<RevisionId> ids;
  std::vector<double> raw;
  for (const auto& r : g.revisions) {
    ids.push_back(r.revision_id);
    raw.push_back(rng.uniform());
  }
  const auto batch = mil_prefix(ids, raw, sessions);
  MilAccumulator acc;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto* slot = sessions.find(ids[i]);
    REQUIRE(acc.add(g.revisions[i].item_id, slot->position, raw[i]) == Approx(batch[i]).epsilon(1e-12));
  }
  const std::vector<RevisionId> stranger = {999999999};
  const std::vector<double> s1 = {0.5};
  REQUIRE(code_of([&] { mil_prefix(stranger, s1, sessions); }) == ErrorCode::UnknownSession);
}

TEST_CASE("meta mean") {
  ScoreTable a, b, c;
  a.add(1, 0.2);
  a.add(2, 1.0);
  b.add(2, 0.0);
  b.add(1, 0.4);
  c.add(1, 0.6);
  c.add(2, 0.5);
  const std::vector<ScoreTable> all = {a, b, c};
  const auto m = meta_mean(all);
  REQUIRE(m.ids == a.ids);
  REQUIRE(m.scores[0] == Approx(0.4));
  REQUIRE(m.scores[1] == Approx(0.5));
  const std::vector<ScoreTable> just_a = {a};
  REQUIRE(meta_mean(just_a) == a);

  ScoreTable short_table;
  short_table.add(1, 0.1);
  const std::vector<ScoreTable> bad = {a, short_table};
  REQUIRE(code_of([&] { meta_mean(bad); }) == ErrorCode::IdSetMismatch);
  ScoreTable other_ids;
  other_ids.add(1, 0.1);
  other_ids.add(3, 0.1);
  const std::vector<ScoreTable> bad2 = {a, other_ids};
  REQUIRE(code_of([&] { meta_mean(bad2); }) == ErrorCode::IdSetMismatch);
}

TEST_CASE("presets") {
  const auto w = presets::wdvd(1);
  REQUIRE(w.mil_enabled);
  REQUIRE(w.forest.tree_count() == 128);
  REQUIRE(w.forest.features_per_split.resolve(100) == 2);
  REQUIRE(w.feature_bases.size() == 47);

  const std::vector<std::string> cols = {"userFrequency", "revisionTags=mobile edit", "revisionTags.freq",
                                         "revisionAction=wbsetlabel", "isRegisteredUser"};
  const auto f = presets::filter(1);
  REQUIRE(f.select(cols) == std::vector<std::size_t>{1, 2});
  REQUIRE_FALSE(f.mil_enabled);

  const auto o = presets::ores(1);
  REQUIRE(o.forest.tree_count() == 80);
  REQUIRE(o.forest.criterion == Criterion::Entropy);
  REQUIRE(o.forest.features_per_split.resolve(8) == 3);
  REQUIRE(o.select(cols) == std::vector<std::size_t>{3, 4});

  REQUIRE(preset_from_name("ores_subset", 1).name == "ores");
  REQUIRE(code_of([] { preset_from_name("nope", 1); }) == ErrorCode::Usage);

  const auto c = presets::custom(nlohmann::json::parse(R"({"features":["userFrequency"],"trees_per_bag":3,
      "features_per_split":"log2","criterion":"entropy","mil":true,"seed":9})"), 1);
  REQUIRE(c.forest.seed == 9);
  REQUIRE(c.mil_enabled);
  REQUIRE(c.select(cols) == std::vector<std::size_t>{0});
  REQUIRE(code_of([] { presets::custom(nlohmann::json::parse(R"({"trees":3})"), 1); }) == ErrorCode::InvalidConfig);
  REQUIRE(code_of([] { presets::custom(nlohmann::json::parse(R"({"criterion":"mse"})"), 1); }) ==
          ErrorCode::InvalidConfig);
  REQUIRE(code_of([] { presets::custom(nlohmann::json::parse(R"({"max_depth":0})"), 1); }) == ErrorCode::InvalidConfig);

  const auto path = std::filesystem::temp_directory_path() / "wdvdb_custom_preset.json";
  std::ofstream(path) << R"({"name":"tiny","trees_per_bag":2})";
  REQUIRE(preset_from_name("custom:" + path.string(), 3).name == "tiny");
  std::filesystem::remove(path);
}
