// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/util/time.hpp"

namespace wdvdb {

/// Half-open UTC interval [from, to).
struct TimeInterval {
  Timestamp from = 0;
  Timestamp to = 0;

  bool contains(Timestamp t) const noexcept { return t >= from && t < to; }
  bool operator==(const TimeInterval&) const = default;
};

struct NamedInterval {
  std::string name;
  TimeInterval interval;
  bool operator==(const NamedInterval&) const = default;
};

class DatasetManifest {
 public:
  DatasetManifest() = default;

  /// Validates and sorts the splits chronologically.
  explicit DatasetManifest(std::vector<NamedInterval> splits) : splits_(std::move(splits)) {
    for (const auto& s : splits_) {
      if (s.name.empty()) fail(ErrorCode::InvalidManifest, "split without a name");
      if (s.interval.from >= s.interval.to)
        fail(ErrorCode::InvalidManifest, "split " + s.name + " has an empty interval");
    }
    std::sort(splits_.begin(), splits_.end(),
              [](const auto& a, const auto& b) { return a.interval.from < b.interval.from; });
    for (std::size_t i = 1; i < splits_.size(); ++i) {
      if (splits_[i].interval.from < splits_[i - 1].interval.to)
        fail(ErrorCode::OverlappingIntervals, "splits " + splits_[i - 1].name + " and " + splits_[i].name + " overlap");
      if (splits_[i].name == splits_[i - 1].name) fail(ErrorCode::InvalidManifest, "duplicate split " + splits_[i].name);
    }
  }

  /// Training Oct 1 2012 - Feb 29 2016, validation Mar 1 - Apr 30 2016,
  /// test May 1 - Jun 30 2016 (inclusive end days).
  static DatasetManifest standard() {
    return DatasetManifest({
        {"TRAINING", {time::from_civil(2012, 10, 1), time::from_civil(2016, 3, 1)}},
        {"VALIDATION", {time::from_civil(2016, 3, 1), time::from_civil(2016, 5, 1)}},
        {"TEST", {time::from_civil(2016, 5, 1), time::from_civil(2016, 7, 1)}},
    });
  }

  const std::vector<NamedInterval>& splits() const noexcept { return splits_; }

  const NamedInterval& get(std::string_view name) const {
    for (const auto& s : splits_)
      if (s.name == name) return s;
    fail(ErrorCode::InvalidManifest, "unknown split " + std::string(name));
  }

 private:
  std::vector<NamedInterval> splits_;
};

inline DatasetManifest parse_manifest(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("splits") || !j["splits"].is_array())
    fail(ErrorCode::InvalidManifest, "manifest must be an object with a \"splits\" array");
  std::vector<NamedInterval> splits;
  for (const auto& s : j["splits"]) {
    if (!s.is_object() || !s.contains("name") || !s.contains("from") || !s.contains("to"))
      fail(ErrorCode::InvalidManifest, "split entries need name, from and to");
    const auto from = time::parse_iso8601(s["from"].get<std::string>());
    const auto to = time::parse_iso8601(s["to"].get<std::string>());
    if (!from || !to) fail(ErrorCode::InvalidManifest, "split times must be ISO-8601 UTC");
    splits.push_back({s["name"].get<std::string>(), {*from, *to}});
  }
  return DatasetManifest(std::move(splits));
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidManifest, std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(j);
}

inline nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json splits = nlohmann::ordered_json::array();
  for (const auto& s : m.splits())
    splits.push_back({{"name", s.name},
                      {"from", time::format_iso8601(s.interval.from)},
                      {"to", time::format_iso8601(s.interval.to)}});
  return {{"splits", splits}};
}

struct SplitPart {
  std::string name;
  TimeInterval interval;
  std::vector<std::size_t> rows;  // indices into the input sequence

  /// Smallest and largest revision id in the part; {0, 0} when empty.
  std::pair<RevisionId, RevisionId> id_range(std::span<const RevisionRecord> revisions) const {
    if (rows.empty()) return {0, 0};
    RevisionId lo = revisions[rows.front()].revision_id, hi = lo;
    for (std::size_t i : rows) {
      lo = std::min(lo, revisions[i].revision_id);
      hi = std::max(hi, revisions[i].revision_id);
    }
    return {lo, hi};
  }
};

struct CorpusSplit {
  std::vector<SplitPart> parts;  // manifest order
  std::size_t dropped = 0;

  const SplitPart& get(std::string_view name) const {
    for (const auto& p : parts)
      if (p.name == name) return p;
    fail(ErrorCode::InvalidManifest, "unknown split " + std::string(name));
  }
};

inline CorpusSplit split_corpus(std::span<const RevisionRecord> revisions, const DatasetManifest& manifest) {
  CorpusSplit out;
  for (const auto& s : manifest.splits()) out.parts.push_back({s.name, s.interval, {}});
  for (std::size_t i = 0; i < revisions.size(); ++i) {
    const Timestamp t = revisions[i].timestamp;
    bool placed = false;
    for (auto& p : out.parts) {
      if (p.interval.contains(t)) {
        p.rows.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) ++out.dropped;
  }
  return out;
}

template <typename T>
std::vector<T> take_rows(std::span<const T> items, const std::vector<std::size_t>& rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t i : rows) out.push_back(items[i]);
  return out;
}

}  // namespace wdvdb
