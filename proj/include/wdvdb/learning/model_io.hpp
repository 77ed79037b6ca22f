// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "wdvdb/error.hpp"
#include "wdvdb/learning/forest.hpp"
#include "wdvdb/util/binary.hpp"

namespace wdvdb {

// Layout: magic, u32 version, then the fields below in order. All integers
// little-endian, doubles as their IEEE-754 bit patterns.
inline constexpr std::string_view kModelMagic = "WDVDBFOR";
inline constexpr std::uint32_t kModelVersion = 1;

inline std::string serialize_model(const ForestModel& m) {
  ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.str(m.preset);
  w.u8(m.mil_enabled ? 1 : 0);
  const ForestConfig& c = m.config;
  w.u32(c.n_bags);
  w.f64(c.bag_fraction);
  w.u32(c.trees_per_bag);
  w.u32(c.max_depth);
  w.u8(static_cast<std::uint8_t>(c.features_per_split.kind));
  w.u32(c.features_per_split.count);
  w.u8(static_cast<std::uint8_t>(c.criterion));
  w.u32(c.min_samples_leaf);
  w.u8(static_cast<std::uint8_t>(c.bag_mode));
  w.u8(c.bootstrap ? 1 : 0);
  w.u64(c.seed);
  w.u64(m.feature_names.size());
  for (const auto& n : m.feature_names) w.str(n);
  w.u8(m.encoder ? 1 : 0);
  if (m.encoder) m.encoder->write(w);
  w.u64(m.trees.size());
  for (const auto& t : m.trees) t.write(w);
  return w.take();
}

inline ForestModel deserialize_model(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kModelMagic.size() || r.raw(kModelMagic.size()) != kModelMagic)
    ByteReader::corrupt("not a model file");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion)
    fail(ErrorCode::VersionMismatch,
         "model format version " + std::to_string(version) + ", expected " + std::to_string(kModelVersion));
  const auto enum_byte = [&](std::uint8_t max) {
    const std::uint8_t v = r.u8();
    if (v > max) ByteReader::corrupt("bad enum value");
    return v;
  };
  ForestModel m;
  m.preset = r.str();
  m.mil_enabled = r.u8() != 0;
  ForestConfig& c = m.config;
  c.n_bags = r.u32();
  c.bag_fraction = r.f64();
  c.trees_per_bag = r.u32();
  c.max_depth = r.u32();
  c.features_per_split.kind = static_cast<FeaturesPerSplit::Kind>(enum_byte(3));
  c.features_per_split.count = r.u32();
  c.criterion = static_cast<Criterion>(enum_byte(1));
  c.min_samples_leaf = r.u32();
  c.bag_mode = static_cast<BagMode>(enum_byte(1));
  c.bootstrap = r.u8() != 0;
  c.seed = r.u64();
  const std::size_t n_features = r.count(4);
  for (std::size_t i = 0; i < n_features; ++i) m.feature_names.push_back(r.str());
  if (r.u8() != 0) m.encoder = Encoder::read(r);
  const std::size_t n_trees = r.count(8);
  m.trees.reserve(n_trees);
  for (std::size_t i = 0; i < n_trees; ++i) m.trees.push_back(DecisionTree::read(r, n_features));
  if (!r.at_end()) ByteReader::corrupt("trailing bytes after model");
  return m;
}

inline void save_model(const ForestModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  const std::string bytes = serialize_model(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

inline ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace wdvdb
