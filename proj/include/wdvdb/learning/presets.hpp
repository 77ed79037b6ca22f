// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wdvdb/error.hpp"
#include "wdvdb/features/encoder.hpp"
#include "wdvdb/features/extractor.hpp"
#include "wdvdb/learning/forest.hpp"

namespace wdvdb {

/// A baseline detector: which encoded columns it sees, how its forest is
/// built, and whether session-prefix scoring is applied.
struct DetectorPreset {
  std::string name;
  std::vector<std::string> feature_bases;  // empty selects every column
  ForestConfig forest;
  bool mil_enabled = false;

  bool selects(std::string_view column) const {
    if (feature_bases.empty()) return true;
    const std::string_view base = column_base(column);
    for (const auto& b : feature_bases)
      if (b == base) return true;
    return false;
  }

  /// Indices of the selected columns in `columns`.
  std::vector<std::size_t> select(const std::vector<std::string>& columns) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (selects(columns[i])) out.push_back(i);
    return out;
  }
};

namespace presets {

/// The 47 WDVD features: every content feature plus the WDVD context features.
inline std::vector<std::string> wdvd_features() {
  std::vector<std::string> out;
  for (auto n : kCharacterFeatureNames) out.emplace_back(n);
  for (auto n : kWordFeatureNames) out.emplace_back(n);
  for (auto n : kSentenceFeatureNames) out.emplace_back(n);
  for (auto n : kStatementFeatureNames) out.emplace_back(n);
  for (auto n : {"isRegisteredUser", "isPrivilegedUser", "userFrequency", "cumUserUniqueItems", "logItemFrequency",
                 "logCumItemUniqueUsers", "commentLength", "isLatinLanguage", "positionWithinSession"})
    out.emplace_back(n);
  for (auto n : kCategoricalFeatureNames) out.emplace_back(n);
  out.emplace_back(kTagFeatureName);
  return out;
}

/// ORES features that exist in the feature module. hasIdentifierChanged,
/// numberOfIdentifiersChanged, userAge, isHuman, isLivingPerson and
/// proportionOfLanguageAdded need data the corpus does not carry.
inline std::vector<std::string> ores_features() {
  return {"proportionOfQidAdded", "proportionOfLinksAdded", "propertyFrequency", "isRegisteredUser",
          "isPrivilegedUser",     "revisionAction",         "revisionSubaction", "changeCount"};
}

inline DetectorPreset wdvd(std::uint64_t seed) {
  DetectorPreset p;
  p.name = "wdvd";
  p.feature_bases = wdvd_features();
  p.forest.n_bags = 16;
  p.forest.bag_fraction = 1.0 / 16.0;
  p.forest.trees_per_bag = 8;
  p.forest.max_depth = 32;
  p.forest.features_per_split = FeaturesPerSplit::fixed(2);
  p.forest.criterion = Criterion::Gini;
  p.forest.bag_mode = BagMode::Partition;
  p.forest.seed = seed;
  p.mil_enabled = true;
  return p;
}

inline DetectorPreset filter(std::uint64_t seed) {
  DetectorPreset p;
  p.name = "filter";
  p.feature_bases = {std::string(kTagFeatureName)};
  p.forest.trees_per_bag = 100;
  p.forest.max_depth = 16;
  p.forest.features_per_split = FeaturesPerSplit::sqrt();
  p.forest.criterion = Criterion::Gini;
  p.forest.seed = seed;
  return p;
}

inline constexpr std::uint32_t kUnlimitedDepth = 1u << 20;

inline DetectorPreset ores(std::uint64_t seed) {
  DetectorPreset p;
  p.name = "ores";
  p.feature_bases = ores_features();
  p.forest.trees_per_bag = 80;
  p.forest.max_depth = kUnlimitedDepth;
  p.forest.features_per_split = FeaturesPerSplit::log2();
  p.forest.criterion = Criterion::Entropy;
  p.forest.seed = seed;
  return p;
}

/// Custom preset from JSON. Recognized keys: features (array of base names),
/// mil, n_bags, bag_fraction, trees_per_bag, max_depth, features_per_split
/// (integer, "log2", "sqrt" or "all"), criterion ("gini" or "entropy"),
/// min_samples_leaf, bag_mode ("partition" or "subsample"), bootstrap.
/// An explicit "seed" key overrides the seed argument.
inline DetectorPreset custom(const nlohmann::json& j, std::uint64_t seed) {
  static const std::unordered_set<std::string> known = {
      "name",      "features",           "mil",       "n_bags",           "bag_fraction", "trees_per_bag",
      "max_depth", "features_per_split", "criterion", "min_samples_leaf", "bag_mode",     "bootstrap", "seed"};
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "custom preset must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) fail(ErrorCode::InvalidConfig, "unknown custom preset key '" + k + "'");
  DetectorPreset p;
  p.name = "custom";
  p.forest.seed = seed;
  try {
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    if (j.contains("features")) p.feature_bases = j.at("features").get<std::vector<std::string>>();
    if (j.contains("mil")) p.mil_enabled = j.at("mil").get<bool>();
    if (j.contains("n_bags")) p.forest.n_bags = j.at("n_bags").get<std::uint32_t>();
    if (j.contains("bag_fraction")) p.forest.bag_fraction = j.at("bag_fraction").get<double>();
    if (j.contains("trees_per_bag")) p.forest.trees_per_bag = j.at("trees_per_bag").get<std::uint32_t>();
    if (j.contains("max_depth")) p.forest.max_depth = j.at("max_depth").get<std::uint32_t>();
    if (j.contains("min_samples_leaf")) p.forest.min_samples_leaf = j.at("min_samples_leaf").get<std::uint32_t>();
    if (j.contains("bootstrap")) p.forest.bootstrap = j.at("bootstrap").get<bool>();
    if (j.contains("seed")) p.forest.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("features_per_split")) {
      const auto& f = j.at("features_per_split");
      if (f.is_number_integer()) p.forest.features_per_split = FeaturesPerSplit::fixed(f.get<std::uint32_t>());
      else if (f == "log2") p.forest.features_per_split = FeaturesPerSplit::log2();
      else if (f == "sqrt") p.forest.features_per_split = FeaturesPerSplit::sqrt();
      else if (f == "all") p.forest.features_per_split = FeaturesPerSplit::all();
      else fail(ErrorCode::InvalidConfig, "bad features_per_split");
    }
    if (j.contains("criterion")) {
      const auto c = j.at("criterion").get<std::string>();
      if (c == "gini") p.forest.criterion = Criterion::Gini;
      else if (c == "entropy") p.forest.criterion = Criterion::Entropy;
      else fail(ErrorCode::InvalidConfig, "bad criterion '" + c + "'");
    }
    if (j.contains("bag_mode")) {
      const auto m = j.at("bag_mode").get<std::string>();
      if (m == "partition") p.forest.bag_mode = BagMode::Partition;
      else if (m == "subsample") p.forest.bag_mode = BagMode::Subsample;
      else fail(ErrorCode::InvalidConfig, "bad bag_mode '" + m + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("custom preset: ") + e.what());
  }
  p.forest.validate();
  return p;
}

}  // namespace presets

/// Resolves "wdvd", "filter", "ores" or "custom:<json file>".
inline DetectorPreset preset_from_name(std::string_view spec, std::uint64_t seed) {
  if (spec == "wdvd") return presets::wdvd(seed);
  if (spec == "filter") return presets::filter(seed);
  if (spec == "ores" || spec == "ores_subset") return presets::ores(seed);
  if (spec.starts_with("custom:")) {
    const std::filesystem::path path(spec.substr(7));
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open preset file " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::InvalidConfig, "preset file " + path.string() + ": " + e.what());
    }
    return presets::custom(j, seed);
  }
  fail(ErrorCode::Usage, "unknown preset '" + std::string(spec) + "' (expected wdvd, filter, ores or custom:<file>)");
}

}  // namespace wdvdb
