// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <variant>

#include "wdvdb/corpus/io.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

// Newline-terminated frames, tab-separated fields.
//   client -> server: HELLO <name> | S <revision_id> <score>
//   server -> client: WELCOME <k> | R <revision_id> <escaped corpus row> | E
namespace wdvdb::wire {

struct Hello {
  std::string client_name;
};
struct Score {
  RevisionId revision_id = 0;
  double score = 0.0;
};
struct Welcome {
  std::int64_t k = 0;
};
struct Revision {
  RevisionRecord record;
};
struct End {};

using ClientFrame = std::variant<Hello, Score>;
using ServerFrame = std::variant<Welcome, Revision, End>;

inline std::string hello(std::string_view name) { return "HELLO\t" + text::escape_field(name) + "\n"; }
inline std::string score(RevisionId id, double s) {
  return "S\t" + std::to_string(id) + "\t" + text::format_double(s) + "\n";
}
inline std::string welcome(std::int64_t k) { return "WELCOME\t" + std::to_string(k) + "\n"; }
inline std::string revision(const RevisionRecord& r) {
  return "R\t" + std::to_string(r.revision_id) + "\t" + text::escape_field(format_row(r)) + "\n";
}
inline std::string end() { return "E\n"; }

namespace detail {

[[noreturn]] inline void violation(std::string_view frame) {
  constexpr std::size_t kShown = 80;
  std::string shown(frame.substr(0, kShown));
  if (frame.size() > kShown) shown += "...";
  fail(ErrorCode::ProtocolViolation, "unexpected frame '" + shown + "'");
}

}  // namespace detail

/// `line` excludes the newline. A score frame with an unreadable number is
/// MalformedScore (detail = `line_no`); range checks are the server's job.
inline ClientFrame parse_client_frame(std::string_view line, std::int64_t line_no = 0) {
  const auto f = text::split(line, '\t');
  if (f[0] == "HELLO" && f.size() == 2) {
    auto name = text::unescape_field(f[1]);
    if (!name) detail::violation(line);
    return Hello{std::move(*name)};
  }
  if (f[0] == "S" && f.size() == 3) {
    const auto id = text::parse_int<RevisionId>(f[1]);
    const auto s = text::parse_double(f[2]);
    if (!id || !s || std::isnan(*s))
      fail(ErrorCode::MalformedScore, "cannot read score frame '" + std::string(line) + "'", line_no);
    return Score{*id, *s};
  }
  detail::violation(line);
}

inline ServerFrame parse_server_frame(std::string_view line) {
  const auto f = text::split(line, '\t');
  if (f[0] == "WELCOME" && f.size() == 2) {
    const auto k = text::parse_int<std::int64_t>(f[1]);
    if (!k || *k < 1) detail::violation(line);
    return Welcome{*k};
  }
  if (f[0] == "R" && f.size() == 3) {
    const auto id = text::parse_int<RevisionId>(f[1]);
    const auto row = text::unescape_field(f[2]);
    if (!id || !row) detail::violation(line);
    RevisionRecord r;
    try {
      r = parse_row(*row, 0);
    } catch (const Error&) {
      detail::violation(line);
    }
    if (r.revision_id != *id) detail::violation(line);
    return Revision{std::move(r)};
  }
  if (line == "E") return End{};
  detail::violation(line);
}

}  // namespace wdvdb::wire
