// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wdvdb/corpus/sessions.hpp"
#include "wdvdb/error.hpp"

namespace wdvdb {

/// Session-prefix scoring: the j-th revision of a session gets the mean of the
/// session's raw scores 1..j. `session_ids[i]` is the session of `raw[i]`;
/// entries are in stream order.
inline std::vector<double> mil_prefix(std::span<const std::int64_t> session_ids, std::span<const double> raw) {
  if (session_ids.size() != raw.size()) fail(ErrorCode::ArityMismatch, "session ids and scores differ in length");
  struct Acc {
    double sum = 0.0;
    std::int64_t n = 0;
  };
  std::unordered_map<std::int64_t, Acc> acc;
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Acc& a = acc[session_ids[i]];
    a.sum += raw[i];
    ++a.n;
    out[i] = a.sum / static_cast<double>(a.n);
  }
  return out;
}

/// As above, looking sessions up by revision id.
inline std::vector<double> mil_prefix(std::span<const RevisionId> ids, std::span<const double> raw,
                                      const SessionAssignment& sessions) {
  if (ids.size() != raw.size()) fail(ErrorCode::ArityMismatch, "ids and scores differ in length");
  std::vector<std::int64_t> sid(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const SessionSlot* s = sessions.find(ids[i]);
    if (!s) fail(ErrorCode::UnknownSession, "revision " + std::to_string(ids[i]) + " has no session", ids[i]);
    sid[i] = s->session_id;
  }
  return mil_prefix(sid, raw);
}

/// Online form for a stream: sessions are tracked per item and restart
/// whenever a revision reports position 1.
class MilAccumulator {
 public:
  double add(const std::string& item_id, std::int64_t position, double raw) {
    Acc& a = acc_[item_id];
    if (position <= 1) a = {};
    a.sum += raw;
    ++a.n;
    return a.sum / static_cast<double>(a.n);
  }

 private:
  struct Acc {
    double sum = 0.0;
    std::int64_t n = 0;
  };
  std::unordered_map<std::string, Acc> acc_;
};

}  // namespace wdvdb
