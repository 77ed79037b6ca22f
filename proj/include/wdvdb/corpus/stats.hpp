// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "wdvdb/corpus/sessions.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"

namespace wdvdb {

struct StatCell {
  std::int64_t total = 0;
  std::int64_t vandalism = 0;
  std::int64_t regular = 0;
  bool operator==(const StatCell&) const = default;
};

/// One entity row (revisions, sessions, ...) split by item part.
struct StatRow {
  StatCell all;
  StatCell head;
  StatCell body;
  bool operator==(const StatRow&) const = default;
};

/// Counts of unique revisions, sessions, items and users. Sessions, items and
/// users are counted under "vandalism" when they have at least one vandalism
/// revision and under "regular" when they have at least one regular revision,
/// so one entity can appear in both columns.
struct CorpusStats {
  StatRow revisions;
  StatRow sessions;
  StatRow items;
  StatRow users;
  bool operator==(const CorpusStats&) const = default;
};

namespace detail {

// Bit flags per entity and part: bit0 = seen, bit1 = vandalism, bit2 = regular.
struct PartFlags {
  std::array<std::uint8_t, 3> flags{};  // all, head, body

  void mark(ContentType type, bool vandalism) {
    const std::uint8_t bits = 1 | (vandalism ? 2 : 4);
    flags[0] |= bits;
    flags[type == ContentType::Head ? 1 : 2] |= bits;
  }
};

inline void accumulate(StatRow& row, const PartFlags& pf) {
  StatCell* cells[3] = {&row.all, &row.head, &row.body};
  for (int p = 0; p < 3; ++p) {
    const std::uint8_t f = pf.flags[p];
    if (!(f & 1)) continue;
    ++cells[p]->total;
    if (f & 2) ++cells[p]->vandalism;
    if (f & 4) ++cells[p]->regular;
  }
}

}  // namespace detail

/// `truth` must label every revision.
inline CorpusStats compute_stats(std::span<const RevisionRecord> revisions, const GroundTruth& truth) {
  std::unordered_map<RevisionId, bool> label;
  label.reserve(truth.size());
  for (const auto& e : truth) label.emplace(e.revision_id, e.is_vandalism);

  const SessionAssignment sessions = assign_sessions(revisions);
  std::unordered_map<std::int64_t, detail::PartFlags> by_session;
  std::unordered_map<std::string, detail::PartFlags> by_item;
  std::unordered_map<std::string, detail::PartFlags> by_user;

  CorpusStats s;
  for (const auto& r : revisions) {
    const auto it = label.find(r.revision_id);
    if (it == label.end())
      fail(ErrorCode::MissingLabel, "no label for revision " + std::to_string(r.revision_id), r.revision_id);
    const bool v = it->second;
    detail::PartFlags one;
    one.mark(r.content_type, v);
    detail::accumulate(s.revisions, one);
    by_session[sessions.find(r.revision_id)->session_id].mark(r.content_type, v);
    by_item[r.item_id].mark(r.content_type, v);
    by_user[r.user_id].mark(r.content_type, v);
  }
  for (const auto& [_, pf] : by_session) detail::accumulate(s.sessions, pf);
  for (const auto& [_, pf] : by_item) detail::accumulate(s.items, pf);
  for (const auto& [_, pf] : by_user) detail::accumulate(s.users, pf);
  return s;
}

inline nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  const auto cell = [](const StatCell& c) {
    return nlohmann::ordered_json{{"total", c.total}, {"vandalism", c.vandalism}, {"regular", c.regular}};
  };
  const auto row = [&](const StatRow& r) {
    return nlohmann::ordered_json{{"all", cell(r.all)}, {"head", cell(r.head)}, {"body", cell(r.body)}};
  };
  return {{"revisions", row(s.revisions)},
          {"sessions", row(s.sessions)},
          {"items", row(s.items)},
          {"users", row(s.users)}};
}

}  // namespace wdvdb
