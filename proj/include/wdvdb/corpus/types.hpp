// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <arpa/inet.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wdvdb/util/time.hpp"

namespace wdvdb {

using RevisionId = std::int64_t;

enum class ContentType { Head, Body };

constexpr std::string_view to_string(ContentType t) { return t == ContentType::Head ? "HEAD" : "BODY"; }

/// Geolocation of an anonymous edit. Any field may be empty.
struct GeoInfo {
  std::string continent;
  std::string country;
  std::string region;
  std::string county;
  std::string city;
  std::string timezone;

  bool empty() const {
    return continent.empty() && country.empty() && region.empty() && county.empty() && city.empty() &&
           timezone.empty();
  }
  bool operator==(const GeoInfo&) const = default;
};

/// One edit event on one item.
struct RevisionRecord {
  RevisionId revision_id = 0;
  Timestamp timestamp = 0;
  std::string item_id;  // "Q<digits>"
  std::string user_id;  // dotted-quad or colon-hex for anonymous users
  bool is_privileged = false;
  ContentType content_type = ContentType::Head;
  std::string comment;
  std::vector<std::string> tags;  // sorted, unique
  std::optional<GeoInfo> geo;
  std::optional<std::string> item_label;
  std::optional<std::string> sitelink_title;
  std::optional<std::string> property_id;  // "P<digits>"
  std::optional<std::string> value_literal;
  std::optional<std::string> value_item;  // "Q<digits>"
  std::int64_t bytes_changed = 0;

  bool operator==(const RevisionRecord&) const = default;
};

struct GroundTruthEntry {
  RevisionId revision_id = 0;
  bool is_vandalism = false;
  std::optional<RevisionId> reverting_revision_id;

  bool operator==(const GroundTruthEntry&) const = default;
};

/// Ground truth in revision-id order.
using GroundTruth = std::vector<GroundTruthEntry>;

/// One rollback: the reverting revision and the revisions it undid.
struct RollbackEvent {
  RevisionId reverting_id = 0;
  std::vector<RevisionId> reverted_ids;

  bool operator==(const RollbackEvent&) const = default;
};

/// True for dotted-quad IPv4 and colon-hex IPv6 user names.
inline bool is_anonymous_user(std::string_view user_id) {
  if (user_id.empty() || user_id.size() > 45) return false;
  const std::string s(user_id);
  unsigned char buf[16];
  if (s.find(':') != std::string::npos) return inet_pton(AF_INET6, s.c_str(), buf) == 1;
  return inet_pton(AF_INET, s.c_str(), buf) == 1;
}

inline bool is_qid(std::string_view s) {
  if (s.size() < 2 || s[0] != 'Q') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

inline bool is_pid(std::string_view s) {
  if (s.size() < 2 || s[0] != 'P') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace wdvdb
