// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/features/comment.hpp"

namespace wdvdb {

struct UserState {
  std::int64_t revisions = 0;
  std::unordered_set<std::string> items;
  std::int64_t vandalism = 0;  // rolled-back revisions seen so far in the stream
};

struct ItemState {
  std::int64_t revisions = 0;
  std::unordered_set<std::string> users;
  std::optional<std::string> prev_action;
  std::optional<std::string> prev_tail;
  std::int64_t vandalism = 0;

  // Trailing editing session on this item.
  std::string session_user;
  std::vector<RevisionId> session_revisions;
  bool session_reverted = false;
};

/// Counts of statement values seen so far, with their denominators.
struct ValueCounts {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;

  /// Prior relative frequency of `value`, or nullopt when undefined.
  std::optional<double> frequency(const std::optional<std::string>& value) const {
    if (!value || total == 0) return std::nullopt;
    const auto it = counts.find(*value);
    return static_cast<double>(it == counts.end() ? 0 : it->second) / static_cast<double>(total);
  }

  void add(const std::optional<std::string>& value) {
    if (!value) return;
    ++counts[*value];
    ++total;
  }
};

/// Everything the features know about the stream so far. Single writer.
class CumulativeState {
 public:
  const UserState* user(const std::string& id) const {
    const auto it = users_.find(id);
    return it == users_.end() ? nullptr : &it->second;
  }
  const ItemState* item(const std::string& id) const {
    const auto it = items_.find(id);
    return it == items_.end() ? nullptr : &it->second;
  }
  const ValueCounts& properties() const noexcept { return properties_; }
  const ValueCounts& value_items() const noexcept { return value_items_; }
  const ValueCounts& value_literals() const noexcept { return value_literals_; }
  std::optional<RevisionId> last_id() const noexcept { return last_id_; }

  /// Position `r` would take in its item's trailing session.
  std::int64_t session_position(const RevisionRecord& r) const {
    const ItemState* it = item(r.item_id);
    if (!it || it->session_user != r.user_id) return 1;
    return static_cast<std::int64_t>(it->session_revisions.size()) + 1;
  }

  /// Folds `r` into the state. A rollback comment naming the editor of the
  /// item's trailing session marks that session's revisions as vandalism.
  void update(const RevisionRecord& r, const ParsedComment& parsed) {
    last_id_ = r.revision_id;
    ItemState& it = items_[r.item_id];

    if (const auto target = rollback_target(r.comment);
        target && !it.session_reverted && it.session_user == *target && !it.session_revisions.empty()) {
      const auto n = static_cast<std::int64_t>(it.session_revisions.size());
      it.vandalism += n;
      users_[*target].vandalism += n;
      it.session_reverted = true;
    }

    UserState& u = users_[r.user_id];
    ++u.revisions;
    u.items.insert(r.item_id);
    ++it.revisions;
    it.users.insert(r.user_id);
    it.prev_action = parsed.action;
    it.prev_tail = parsed.tail;
    if (it.session_user == r.user_id) {
      it.session_revisions.push_back(r.revision_id);
    } else {
      it.session_user = r.user_id;
      it.session_revisions.assign(1, r.revision_id);
      it.session_reverted = false;
    }

    if (r.property_id) {
      properties_.add(r.property_id);
      value_items_.add(r.value_item);
      value_literals_.add(r.value_literal);
    }
  }

 private:
  std::unordered_map<std::string, UserState> users_;
  std::unordered_map<std::string, ItemState> items_;
  ValueCounts properties_, value_items_, value_literals_;
  std::optional<RevisionId> last_id_;
};

}  // namespace wdvdb
