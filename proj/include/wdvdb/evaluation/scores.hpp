// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// Scores of one detector, in stream order.
struct ScoreTable {
  std::vector<RevisionId> ids;
  std::vector<double> scores;

  std::size_t size() const noexcept { return ids.size(); }
  void add(RevisionId id, double score) {
    ids.push_back(id);
    scores.push_back(score);
  }
  bool operator==(const ScoreTable&) const = default;
};

/// Two columns, revision_id and score; no header.
inline void write_scores(std::ostream& out, const ScoreTable& t) {
  for (std::size_t i = 0; i < t.size(); ++i) out << t.ids[i] << '\t' << text::format_double(t.scores[i]) << '\n';
}

inline void save_scores(const std::filesystem::path& path, const ScoreTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
  write_scores(out, t);
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

/// Reads a score table. A first line whose id column is not a number is taken
/// as a header and skipped.
inline ScoreTable read_scores(std::istream& in) {
  ScoreTable t;
  std::unordered_set<RevisionId> seen;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = text::split(line, '\t');
    const auto id = cols.size() == 2 ? text::parse_int<RevisionId>(cols[0]) : std::nullopt;
    if (!id && line_no == 1 && cols.size() == 2) continue;
    const auto score = cols.size() == 2 ? text::parse_double(cols[1]) : std::nullopt;
    if (!id || !score) fail(ErrorCode::MalformedRow, "bad score row at line " + std::to_string(line_no), line_no);
    if (!(*score >= 0.0 && *score <= 1.0))
      fail(ErrorCode::MalformedRow, "score outside [0,1] at line " + std::to_string(line_no), line_no);
    if (!seen.insert(*id).second) fail(ErrorCode::DuplicateId, "duplicate revision " + std::to_string(*id), *id);
    t.add(*id, *score);
  }
  return t;
}

inline ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_scores(in);
}

}  // namespace wdvdb
