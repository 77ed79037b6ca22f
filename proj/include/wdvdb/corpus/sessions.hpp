// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wdvdb/corpus/types.hpp"

namespace wdvdb {

struct SessionSlot {
  std::int64_t session_id = 0;
  std::int64_t position = 0;  // 1-based within the session
};

/// Editing sessions: maximal runs of one user's consecutive revisions
/// within a single item's revision history. Sessions are numbered from 0 in
/// order of their first revision.
class SessionAssignment {
 public:
  SessionAssignment() = default;

  void assign(RevisionId id, SessionSlot slot) {
    index_.emplace(id, slots_.size());
    ids_.push_back(id);
    slots_.push_back(slot);
    if (slot.session_id >= session_count_) session_count_ = slot.session_id + 1;
  }

  const SessionSlot* find(RevisionId id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &slots_[it->second];
  }

  std::size_t size() const noexcept { return slots_.size(); }
  std::int64_t session_count() const noexcept { return session_count_; }

  /// Revision ids in input order, parallel to slots().
  std::span<const RevisionId> ids() const noexcept { return ids_; }
  std::span<const SessionSlot> slots() const noexcept { return slots_; }

 private:
  std::vector<RevisionId> ids_;
  std::vector<SessionSlot> slots_;
  std::unordered_map<RevisionId, std::size_t> index_;
  std::int64_t session_count_ = 0;
};

/// Input must be in revision-id order.
inline SessionAssignment assign_sessions(std::span<const RevisionRecord> revisions) {
  struct Tail {
    const std::string* user;
    SessionSlot slot;
  };
  std::unordered_map<std::string, Tail> last_on_item;
  SessionAssignment out;
  std::int64_t next_session = 0;
  for (const auto& r : revisions) {
    auto it = last_on_item.find(r.item_id);
    SessionSlot slot;
    if (it != last_on_item.end() && *it->second.user == r.user_id) {
      slot = {it->second.slot.session_id, it->second.slot.position + 1};
    } else {
      slot = {next_session++, 1};
    }
    last_on_item.insert_or_assign(r.item_id, Tail{&r.user_id, slot});
    out.assign(r.revision_id, slot);
  }
  return out;
}

}  // namespace wdvdb
