// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// Decomposition of an auto-generated revision comment
///   /* <action>[-<subaction>]:<count>|<language>[|<param>] */ <tail>
/// A comment without a well-formed block is all tail.
struct ParsedComment {
  std::optional<std::string> action;
  std::optional<std::string> subaction;
  std::optional<std::int64_t> count;
  std::optional<std::string> language;
  std::optional<std::string> param;  // may be present and empty ("|en|")
  std::optional<std::string> tail;   // never empty

  bool operator==(const ParsedComment&) const = default;
};

namespace detail {

inline bool is_lower_alnum(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  return true;
}

inline bool is_subaction(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
  return true;
}

inline std::optional<std::string> non_empty(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

}  // namespace detail

inline ParsedComment parse_comment(std::string_view comment) {
  ParsedComment tail_only;
  tail_only.tail = detail::non_empty(comment);

  if (!comment.starts_with("/* ")) return tail_only;
  const std::size_t close = comment.find(" */", 3);
  if (close == std::string_view::npos) return tail_only;
  const std::string_view block = comment.substr(3, close - 3);
  std::string_view rest = comment.substr(close + 3);
  if (!rest.empty()) {
    if (rest.front() != ' ') return tail_only;
    rest.remove_prefix(1);
  }

  const std::size_t colon = block.find(':');
  if (colon == std::string_view::npos) return tail_only;
  const std::string_view head = block.substr(0, colon);
  const std::string_view after = block.substr(colon + 1);
  const std::size_t bar = after.find('|');
  if (bar == std::string_view::npos) return tail_only;
  const std::string_view count_text = after.substr(0, bar);
  const std::string_view lang_and_param = after.substr(bar + 1);

  ParsedComment out;
  const std::size_t dash = head.find('-');
  const std::string_view action = head.substr(0, dash);
  if (!detail::is_lower_alnum(action)) return tail_only;
  out.action = std::string(action);
  if (dash != std::string_view::npos) {
    const std::string_view sub = head.substr(dash + 1);
    if (!detail::is_subaction(sub)) return tail_only;
    out.subaction = std::string(sub);
  }

  const auto count = text::parse_int<std::int64_t>(count_text);
  if (!count || *count < 0 || (count_text.size() > 1 && count_text.front() == '0')) return tail_only;
  out.count = count;

  const std::size_t bar2 = lang_and_param.find('|');
  out.language = detail::non_empty(lang_and_param.substr(0, bar2));
  if (out.language && out.language->find_first_of(" \t") != std::string::npos) return tail_only;
  if (bar2 != std::string_view::npos) out.param = std::string(lang_and_param.substr(bar2 + 1));
  out.tail = detail::non_empty(rest);
  return out;
}

/// Inverse of parse_comment for comments that carry a block.
inline std::string format_comment(const ParsedComment& c) {
  if (!c.action) return c.tail.value_or("");
  std::string out = "/* " + *c.action;
  if (c.subaction) out += "-" + *c.subaction;
  out += ":" + std::to_string(c.count.value_or(0)) + "|" + c.language.value_or("");
  if (c.param) out += "|" + *c.param;
  out += " */";
  if (c.tail) out += " " + *c.tail;
  return out;
}

/// Rollback comments name the reverted editor:
///   "Reverted edits by [[Special:Contributions/<user>|<user>]] ..."
/// Returns that editor, or nullopt for any other comment.
inline std::optional<std::string> rollback_target(std::string_view comment) {
  constexpr std::string_view kPrefix = "Reverted edits by [[Special:Contributions/";
  if (!comment.starts_with(kPrefix)) return std::nullopt;
  const std::string_view rest = comment.substr(kPrefix.size());
  const std::size_t end = rest.find('|');
  if (end == std::string_view::npos || end == 0) return std::nullopt;
  return std::string(rest.substr(0, end));
}

inline std::string format_rollback_comment(std::string_view reverted_user, std::string_view restored_user) {
  std::string out = "Reverted edits by [[Special:Contributions/";
  out += reverted_user;
  out += "|";
  out += reverted_user;
  out += "]] ([[User talk:";
  out += reverted_user;
  out += "|talk]]) to last revision by [[User:";
  out += restored_user;
  out += "|";
  out += restored_user;
  out += "]]";
  return out;
}

}  // namespace wdvdb
