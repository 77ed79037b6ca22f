// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

enum class TraceEventType : std::uint8_t { Sent, Scored, End };

struct TraceEvent {
  TraceEventType type = TraceEventType::End;
  std::int64_t seq = 0;
  RevisionId revision_id = 0;  // unused for End
  double score = 0.0;          // Scored only

  bool operator==(const TraceEvent&) const = default;
};

/// Everything that crossed the wire during one replay, as seen by the server.
struct StreamTrace {
  std::vector<TraceEvent> events;

  std::int64_t next_seq() const noexcept { return static_cast<std::int64_t>(events.size()) + 1; }
  void sent(RevisionId id) { events.push_back({TraceEventType::Sent, next_seq(), id, 0.0}); }
  void scored(RevisionId id, double s) { events.push_back({TraceEventType::Scored, next_seq(), id, s}); }
  void end() { events.push_back({TraceEventType::End, next_seq(), 0, 0.0}); }

  bool ended() const noexcept { return !events.empty() && events.back().type == TraceEventType::End; }

  /// Largest number of sent-but-unscored revisions at any point.
  std::int64_t max_outstanding() const noexcept {
    std::int64_t open = 0, peak = 0;
    for (const auto& e : events) {
      if (e.type == TraceEventType::Sent) peak = std::max(peak, ++open);
      else if (e.type == TraceEventType::Scored) --open;
    }
    return peak;
  }

  bool operator==(const StreamTrace&) const = default;
};

/// Ground-truth labels revealed inside the window.
struct LeakReport {
  std::int64_t leaked_regular = 0;
  std::int64_t leaked_vandalism = 0;
  double leaked_fraction = 0.0;  // leaked / ground-truth size

  bool operator==(const LeakReport&) const = default;
};

/// Checks the trace invariants: seq strictly increasing; each revision sent
/// once and in increasing id order; each score follows its send and appears
/// once; exactly one END, last. `require_end` = false accepts a trace cut
/// short by an error.
inline void validate_trace(const StreamTrace& t, bool require_end = true) {
  const auto bad = [](const std::string& msg, std::int64_t seq) { fail(ErrorCode::MalformedTrace, msg, seq); };
  std::unordered_map<RevisionId, bool> state;  // id -> scored
  std::int64_t last_seq = 0;
  std::optional<RevisionId> last_sent;
  bool ended = false;
  for (const auto& e : t.events) {
    if (ended) bad("event after END", e.seq);
    if (e.seq <= last_seq) bad("sequence numbers not increasing", e.seq);
    last_seq = e.seq;
    switch (e.type) {
      case TraceEventType::Sent:
        if (last_sent && e.revision_id <= *last_sent) bad("revisions not sent in id order", e.seq);
        last_sent = e.revision_id;
        state.emplace(e.revision_id, false);
        break;
      case TraceEventType::Scored: {
        const auto it = state.find(e.revision_id);
        if (it == state.end()) bad("score before send for " + std::to_string(e.revision_id), e.seq);
        if (it->second) bad("revision scored twice: " + std::to_string(e.revision_id), e.seq);
        it->second = true;
        break;
      }
      case TraceEventType::End:
        ended = true;
        break;
    }
  }
  if (require_end && !ended) bad("trace has no END", last_seq);
}

/// One event per line: "SENT seq id", "SCORED seq id score", "END seq" (tab separated).
inline void write_trace(std::ostream& out, const StreamTrace& t) {
  for (const auto& e : t.events) {
    switch (e.type) {
      case TraceEventType::Sent: out << "SENT\t" << e.seq << '\t' << e.revision_id << '\n'; break;
      case TraceEventType::Scored:
        out << "SCORED\t" << e.seq << '\t' << e.revision_id << '\t' << text::format_double(e.score) << '\n';
        break;
      case TraceEventType::End: out << "END\t" << e.seq << '\n'; break;
    }
  }
}

inline StreamTrace read_trace(std::istream& in) {
  StreamTrace t;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    const auto bad = [&] { fail(ErrorCode::MalformedTrace, "bad trace line " + std::to_string(line_no), line_no); };
    TraceEvent e;
    const auto seq = f.size() >= 2 ? text::parse_int<std::int64_t>(f[1]) : std::nullopt;
    if (!seq) bad();
    e.seq = *seq;
    if (f[0] == "SENT" && f.size() == 3) {
      e.type = TraceEventType::Sent;
    } else if (f[0] == "SCORED" && f.size() == 4) {
      e.type = TraceEventType::Scored;
      const auto s = text::parse_double(f[3]);
      if (!s) bad();
      e.score = *s;
    } else if (f[0] == "END" && f.size() == 2) {
      e.type = TraceEventType::End;
    } else {
      bad();
    }
    if (e.type != TraceEventType::End) {
      const auto id = text::parse_int<RevisionId>(f[2]);
      if (!id) bad();
      e.revision_id = *id;
    }
    t.events.push_back(e);
  }
  return t;
}

inline void save_trace(const std::filesystem::path& path, const StreamTrace& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  write_trace(out, t);
}

inline StreamTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_trace(in);
}

}  // namespace wdvdb
