// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/protocol/trace.hpp"

namespace wdvdb {

/// Counts labels revealed inside the window. When rollback r goes out at seq
/// q, every revision of r's item that was sent before q and is still unscored
/// at q has its label revealed: vandalism if r reverts it, regular otherwise.
/// Each revision counts once. `corpus_size` is the ground-truth size the
/// fraction refers to.
inline LeakReport audit_leak(const StreamTrace& trace, std::span<const RevisionRecord> revisions,
                             std::span<const RollbackEvent> rollbacks, std::size_t corpus_size) {
  validate_trace(trace);
  std::unordered_map<RevisionId, const std::string*> item_of;
  item_of.reserve(revisions.size());
  for (const auto& r : revisions) item_of.emplace(r.revision_id, &r.item_id);
  std::unordered_map<RevisionId, const RollbackEvent*> rollback_of;
  for (const auto& e : rollbacks) rollback_of.emplace(e.reverting_id, &e);

  const auto item = [&](RevisionId id) -> const std::string& {
    const auto it = item_of.find(id);
    if (it == item_of.end())
      fail(ErrorCode::MalformedTrace, "trace names revision " + std::to_string(id) + " missing from the corpus", id);
    return *it->second;
  };

  std::vector<RevisionId> open;  // sent, not yet scored; small (at most k)
  std::unordered_map<RevisionId, bool> leaked;  // id -> revealed as vandalism
  for (const auto& e : trace.events) {
    if (e.type == TraceEventType::Scored) {
      open.erase(std::find(open.begin(), open.end(), e.revision_id));
      continue;
    }
    if (e.type != TraceEventType::Sent) continue;
    if (const auto rb = rollback_of.find(e.revision_id); rb != rollback_of.end()) {
      const std::string& target_item = item(e.revision_id);
      const auto& reverted = rb->second->reverted_ids;
      for (RevisionId x : open) {
        if (item(x) != target_item) continue;
        const bool vandal = std::find(reverted.begin(), reverted.end(), x) != reverted.end();
        leaked[x] = leaked[x] || vandal;
      }
    }
    open.push_back(e.revision_id);
  }

  LeakReport report;
  for (const auto& [id, vandal] : leaked) (vandal ? report.leaked_vandalism : report.leaked_regular)++;
  if (corpus_size > 0)
    report.leaked_fraction =
        static_cast<double>(report.leaked_regular + report.leaked_vandalism) / static_cast<double>(corpus_size);
  return report;
}

}  // namespace wdvdb
