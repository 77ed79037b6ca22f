// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

// Corpus TSV: one revision per line, no header, 20 columns:
//   revision_id timestamp item_id user_id is_privileged content_type comment
//   tags continent country region county city timezone item_label
//   sitelink_title property_id value_literal value_item bytes_changed
inline constexpr std::size_t kCorpusColumns = 20;

namespace detail {

inline void put_optional(std::string& out, const std::optional<std::string>& v) {
  if (v) out += text::escape_field(*v);
}

inline std::optional<std::string> optional_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace detail

inline std::string format_row(const RevisionRecord& r) {
  std::string out;
  out.reserve(128 + r.comment.size());
  const auto tab = [&] { out += '\t'; };
  out += std::to_string(r.revision_id);
  tab();
  out += std::to_string(r.timestamp);
  tab();
  out += text::escape_field(r.item_id);
  tab();
  out += text::escape_field(r.user_id);
  tab();
  out += r.is_privileged ? '1' : '0';
  tab();
  out += to_string(r.content_type);
  tab();
  out += text::escape_field(r.comment);
  tab();
  out += text::escape_field(text::join(r.tags, ","));
  const GeoInfo geo = r.geo.value_or(GeoInfo{});
  for (const std::string* f : {&geo.continent, &geo.country, &geo.region, &geo.county, &geo.city, &geo.timezone}) {
    tab();
    out += text::escape_field(*f);
  }
  tab();
  detail::put_optional(out, r.item_label);
  tab();
  detail::put_optional(out, r.sitelink_title);
  tab();
  detail::put_optional(out, r.property_id);
  tab();
  detail::put_optional(out, r.value_literal);
  tab();
  detail::put_optional(out, r.value_item);
  tab();
  out += std::to_string(r.bytes_changed);
  return out;
}

/// Parses one corpus row. Throws MalformedRow(line_no) on any schema violation.
inline RevisionRecord parse_row(std::string_view line, std::int64_t line_no) {
  const auto bad = [&](const std::string& why) -> RevisionRecord {
    fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + why, line_no);
  };
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto cols = text::split(line, '\t');
  if (cols.size() != kCorpusColumns)
    return bad("expected " + std::to_string(kCorpusColumns) + " columns, got " + std::to_string(cols.size()));

  std::vector<std::string> f;
  f.reserve(cols.size());
  for (std::string_view c : cols) {
    auto u = text::unescape_field(c);
    if (!u) return bad("invalid escape sequence");
    f.push_back(std::move(*u));
  }

  RevisionRecord r;
  const auto id = text::parse_int<RevisionId>(f[0]);
  if (!id || *id <= 0) return bad("revision_id must be a positive integer");
  r.revision_id = *id;
  const auto ts = text::parse_int<Timestamp>(f[1]);
  if (!ts) return bad("timestamp must be integer epoch seconds");
  r.timestamp = *ts;
  if (!is_qid(f[2])) return bad("item_id must have the form Q<digits>");
  r.item_id = f[2];
  if (f[3].empty()) return bad("user_id is empty");
  r.user_id = f[3];
  if (f[4] != "0" && f[4] != "1") return bad("is_privileged must be 0 or 1");
  r.is_privileged = f[4] == "1";
  if (f[5] == "HEAD") r.content_type = ContentType::Head;
  else if (f[5] == "BODY") r.content_type = ContentType::Body;
  else return bad("content_type must be HEAD or BODY");
  r.comment = f[6];
  if (!f[7].empty()) {
    for (std::string_view t : text::split(f[7], ',')) {
      if (t.empty()) return bad("empty tag");
      r.tags.emplace_back(t);
    }
    std::sort(r.tags.begin(), r.tags.end());
    r.tags.erase(std::unique(r.tags.begin(), r.tags.end()), r.tags.end());
  }
  GeoInfo geo{f[8], f[9], f[10], f[11], f[12], f[13]};
  if (!geo.empty()) {
    if (!is_anonymous_user(r.user_id)) return bad("geolocation present for a registered user");
    r.geo = std::move(geo);
  }
  r.item_label = detail::optional_field(f[14]);
  r.sitelink_title = detail::optional_field(f[15]);
  r.property_id = detail::optional_field(f[16]);
  if (r.property_id && !is_pid(*r.property_id)) return bad("property_id must have the form P<digits>");
  if (r.property_id && r.content_type != ContentType::Body) return bad("property edit must be BODY");
  r.value_literal = detail::optional_field(f[17]);
  r.value_item = detail::optional_field(f[18]);
  if (r.value_item && !is_qid(*r.value_item)) return bad("value_item must have the form Q<digits>");
  const auto bytes = text::parse_int<std::int64_t>(f[19]);
  if (!bytes) return bad("bytes_changed must be an integer");
  r.bytes_changed = *bytes;
  return r;
}

/// Reads a corpus stream; rows must be in strictly increasing id order.
inline std::vector<RevisionRecord> read_corpus(std::istream& in) {
  std::vector<RevisionRecord> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    RevisionRecord r = parse_row(line, line_no);
    if (!out.empty()) {
      if (r.revision_id == out.back().revision_id)
        fail(ErrorCode::DuplicateId, "revision " + std::to_string(r.revision_id) + " repeated at line " +
                                         std::to_string(line_no),
             r.revision_id);
      if (r.revision_id < out.back().revision_id)
        fail(ErrorCode::NonMonotoneId, "line " + std::to_string(line_no) + ": id " +
                                           std::to_string(r.revision_id) + " after " +
                                           std::to_string(out.back().revision_id),
             line_no);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<RevisionRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open corpus " + path.string());
  return read_corpus(in);
}

inline void write_corpus(std::ostream& out, const std::vector<RevisionRecord>& revisions) {
  for (const auto& r : revisions) out << format_row(r) << '\n';
}

inline void save_corpus(const std::filesystem::path& path, const std::vector<RevisionRecord>& revisions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write corpus " + path.string());
  write_corpus(out, revisions);
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

// Ground-truth TSV: revision_id, is_vandalism(0/1), reverting_revision_id (may be empty).

inline GroundTruth read_truth(std::istream& in) {
  GroundTruth out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = text::split(line, '\t');
    const auto bad = [&](const std::string& why) {
      fail(ErrorCode::MalformedRow, "truth line " + std::to_string(line_no) + ": " + why, line_no);
    };
    if (cols.size() != 3) bad("expected 3 columns");
    GroundTruthEntry e;
    const auto id = text::parse_int<RevisionId>(cols[0]);
    if (!id || *id <= 0) bad("revision_id must be a positive integer");
    e.revision_id = *id;
    if (cols[1] != "0" && cols[1] != "1") bad("is_vandalism must be 0 or 1");
    e.is_vandalism = cols[1] == "1";
    if (!cols[2].empty()) {
      const auto rev = text::parse_int<RevisionId>(cols[2]);
      if (!rev || *rev <= e.revision_id) bad("reverting_revision_id must exceed revision_id");
      e.reverting_revision_id = *rev;
    }
    if (e.is_vandalism && !e.reverting_revision_id) bad("vandalism without reverting revision");
    if (!out.empty()) {
      if (e.revision_id == out.back().revision_id)
        fail(ErrorCode::DuplicateId, "truth revision repeated", e.revision_id);
      if (e.revision_id < out.back().revision_id)
        fail(ErrorCode::NonMonotoneId, "truth line " + std::to_string(line_no) + " out of order", line_no);
    }
    out.push_back(e);
  }
  return out;
}

inline GroundTruth load_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open ground truth " + path.string());
  return read_truth(in);
}

inline void write_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& e : truth) {
    out << e.revision_id << '\t' << (e.is_vandalism ? '1' : '0') << '\t';
    if (e.reverting_revision_id) out << *e.reverting_revision_id;
    out << '\n';
  }
}

inline void save_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot write ground truth " + path.string());
  write_truth(out, truth);
}

/// Groups vandalism labels by reverting revision, ordered by reverting id.
inline std::vector<RollbackEvent> rollback_events(const GroundTruth& truth) {
  std::vector<std::pair<RevisionId, RevisionId>> pairs;
  for (const auto& e : truth)
    if (e.is_vandalism && e.reverting_revision_id) pairs.emplace_back(*e.reverting_revision_id, e.revision_id);
  std::sort(pairs.begin(), pairs.end());
  std::vector<RollbackEvent> events;
  for (const auto& [rev, target] : pairs) {
    if (events.empty() || events.back().reverting_id != rev) events.push_back({rev, {}});
    events.back().reverted_ids.push_back(target);
  }
  return events;
}

}  // namespace wdvdb
