// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <unordered_map>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"

namespace wdvdb {

/// Labels every revision named in a rollback's reverted set as vandalism.
/// A revision reverted more than once keeps the smallest reverting id, so the
/// result does not depend on event order.
inline GroundTruth label_from_rollbacks(std::span<const RevisionRecord> revisions,
                                        std::span<const RollbackEvent> rollbacks) {
  GroundTruth truth;
  truth.reserve(revisions.size());
  std::unordered_map<RevisionId, std::size_t> index;
  index.reserve(revisions.size());
  for (const auto& r : revisions) {
    index.emplace(r.revision_id, truth.size());
    truth.push_back({r.revision_id, false, std::nullopt});
  }
  for (const auto& ev : rollbacks) {
    for (RevisionId target : ev.reverted_ids) {
      const auto it = index.find(target);
      if (it == index.end())
        fail(ErrorCode::UnknownRevision, "rollback " + std::to_string(ev.reverting_id) + " names unknown revision " +
                                             std::to_string(target),
             target);
      if (ev.reverting_id <= target)
        fail(ErrorCode::InvalidRollback, "rollback " + std::to_string(ev.reverting_id) +
                                             " does not follow revision " + std::to_string(target),
             target);
      auto& e = truth[it->second];
      e.is_vandalism = true;
      if (!e.reverting_revision_id || ev.reverting_id < *e.reverting_revision_id) e.reverting_revision_id = ev.reverting_id;
    }
  }
  return truth;
}

}  // namespace wdvdb
