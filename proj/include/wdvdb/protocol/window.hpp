// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/protocol/trace.hpp"

namespace wdvdb {

/// Server-side backpressure state: revisions go out in order, and at most
/// `k` may be sent but unscored at any time. Every transition is recorded.
class ReplayWindow {
 public:
  ReplayWindow(std::span<const RevisionRecord> revisions, std::int64_t k) : revisions_(revisions), k_(k) {
    if (k < 1) fail(ErrorCode::InvalidConfig, "window k must be at least 1, got " + std::to_string(k));
    for (std::size_t i = 1; i < revisions.size(); ++i)
      if (revisions[i].revision_id <= revisions[i - 1].revision_id)
        fail(ErrorCode::NonMonotoneId, "revisions must be sorted by id", revisions[i].revision_id);
    outstanding_.reserve(static_cast<std::size_t>(k) * 2);
  }

  std::int64_t k() const noexcept { return k_; }
  std::int64_t open() const noexcept { return static_cast<std::int64_t>(outstanding_.size()); }
  std::size_t sent_count() const noexcept { return next_; }
  std::size_t scored_count() const noexcept { return scored_; }
  bool can_send() const noexcept { return next_ < revisions_.size() && open() < k_; }
  bool all_scored() const noexcept { return scored_ == revisions_.size(); }
  const StreamTrace& trace() const noexcept { return trace_; }
  StreamTrace& trace() noexcept { return trace_; }

  /// Oldest revision still waiting for its score; 0 when none.
  RevisionId oldest_open() const noexcept {
    RevisionId best = 0;
    for (const auto& [id, _] : outstanding_)
      if (best == 0 || id < best) best = id;
    return best;
  }

  const RevisionRecord& send() {
    if (!can_send()) fail(ErrorCode::ProtocolViolation, "window is full");
    const RevisionRecord& r = revisions_[next_++];
    outstanding_.emplace(r.revision_id, true);
    trace_.sent(r.revision_id);
    return r;
  }

  /// Scores must be in [0, 1] and name an open revision.
  void score(RevisionId id, double s) {
    if (!(s >= 0.0 && s <= 1.0))
      fail(ErrorCode::ScoreOutOfRange, "score for revision " + std::to_string(id) + " outside [0,1]", id);
    if (outstanding_.erase(id) == 0)
      fail(ErrorCode::UnknownRevisionScored, "revision " + std::to_string(id) + " is not awaiting a score", id);
    ++scored_;
    trace_.scored(id, s);
  }

  void end() {
    if (!all_scored()) fail(ErrorCode::ProtocolViolation, "END before every revision was scored");
    trace_.end();
  }

 private:
  std::span<const RevisionRecord> revisions_;
  std::int64_t k_;
  std::size_t next_ = 0;
  std::size_t scored_ = 0;
  std::unordered_map<RevisionId, bool> outstanding_;
  StreamTrace trace_;
};

}  // namespace wdvdb
