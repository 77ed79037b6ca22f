// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wdvdb/features/lexicons.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// Out-of-band marker for a feature value that is not defined.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

inline constexpr std::array<std::string_view, 11> kCharacterFeatureNames = {
    "lowerCaseRatio", "upperCaseRatio",           "nonLatinRatio", "latinRatio",
    "alphanumericRatio", "digitRatio",            "punctuationRatio", "whitespaceRatio",
    "longestCharacterSequence", "asciiRatio",     "bracketRatio",
};

inline constexpr std::array<std::string_view, 9> kWordFeatureNames = {
    "languageWordRatio", "containsLanguageWord", "lowerCaseWordRatio",
    "longestWord",       "containsURL",          "badWordRatio",
    "proportionOfQidAdded", "upperCaseWordRatio", "proportionOfLinksAdded",
};

inline constexpr std::array<std::string_view, 4> kSentenceFeatureNames = {
    "commentTailLength", "commentLabelSimilarity", "commentSitelinkSimilarity", "commentCommentSimilarity"};

using CharacterFeatures = std::array<double, kCharacterFeatureNames.size()>;
using WordFeatures = std::array<double, kWordFeatureNames.size()>;
using SentenceFeatures = std::array<double, kSentenceFeatureNames.size()>;

inline CharacterFeatures character_features(const std::optional<std::string>& tail) {
  CharacterFeatures out;
  out.fill(kMissing);
  if (!tail) return out;
  const std::vector<char32_t> cps = text::decode_utf8(*tail);
  if (cps.empty()) return out;

  double lower = 0, upper = 0, digit = 0, punct = 0, space = 0, ascii = 0, bracket = 0, alnum = 0;
  double letters = 0, latin = 0;
  std::size_t longest = 0, run = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    const bool letter = text::is_letter(c);
    lower += text::is_lower(c);
    upper += text::is_upper(c);
    digit += text::is_digit(c);
    punct += text::is_ascii_punct(c);
    space += text::is_space(c);
    ascii += c < 0x80;
    bracket += text::is_bracket(c);
    alnum += letter || text::is_digit(c);
    letters += letter;
    latin += text::is_latin_letter(c);
    run = (i > 0 && cps[i - 1] == c) ? run + 1 : 1;
    longest = std::max(longest, run);
  }
  const double n = static_cast<double>(cps.size());
  out = {lower / n,
         upper / n,
         letters > 0 ? (letters - latin) / letters : kMissing,
         letters > 0 ? latin / letters : kMissing,
         alnum / n,
         digit / n,
         punct / n,
         space / n,
         static_cast<double>(longest),
         ascii / n,
         bracket / n};
  return out;
}

namespace detail {

inline std::string_view strip_punct(std::string_view tok) {
  const auto punct = [](char c) { return text::is_ascii_punct(static_cast<unsigned char>(c)); };
  while (!tok.empty() && punct(tok.front())) tok.remove_prefix(1);
  while (!tok.empty() && punct(tok.back())) tok.remove_suffix(1);
  return tok;
}

inline bool is_qid_token(std::string_view tok) {
  tok = strip_punct(tok);
  if (tok.size() < 2 || tok[0] != 'Q') return false;
  return std::all_of(tok.begin() + 1, tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

/// Words are maximal runs of letters; tokens are whitespace-separated.
inline WordFeatures word_features(const std::optional<std::string>& tail, const Lexicons& lex) {
  WordFeatures out;
  out.fill(kMissing);
  if (!tail) return out;

  std::vector<std::u32string> words;
  std::u32string cur;
  for (char32_t c : text::decode_utf8(*tail)) {
    if (text::is_letter(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));

  double bad = 0, language = 0, lower_words = 0, upper_words = 0;
  std::size_t longest = 0;
  for (const auto& w : words) {
    std::string lowered;
    bool all_lower = true, all_upper = true;
    for (char32_t c : w) {
      text::append_utf8(lowered, text::to_lower(c));
      all_lower = all_lower && text::is_lower(c);
      all_upper = all_upper && text::is_upper(c);
    }
    bad += lex.bad_words.contains(lowered);
    language += lex.language_words.contains(lowered);
    lower_words += all_lower;
    upper_words += all_upper;
    longest = std::max(longest, w.size());
  }

  double tokens = 0, qids = 0;
  std::size_t pos = 0;
  const std::string_view s = *tail;
  while (pos < s.size()) {
    while (pos < s.size() && text::is_space(static_cast<unsigned char>(s[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && !text::is_space(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos > start) {
      ++tokens;
      qids += detail::is_qid_token(s.substr(start, pos - start));
    }
  }
  double links = 0;
  for (std::size_t p = s.find("[["); p != std::string_view::npos; p = s.find("[[", p + 2)) ++links;

  const double nw = static_cast<double>(words.size());
  const bool url = s.find("http://") != std::string_view::npos || s.find("https://") != std::string_view::npos;
  out = {nw > 0 ? language / nw : kMissing,
         language > 0 ? 1.0 : 0.0,
         nw > 0 ? lower_words / nw : kMissing,
         static_cast<double>(longest),
         url ? 1.0 : 0.0,
         nw > 0 ? bad / nw : kMissing,
         tokens > 0 ? qids / tokens : kMissing,
         nw > 0 ? upper_words / nw : kMissing,
         tokens > 0 ? links / tokens : kMissing};
  return out;
}

/// Levenshtein distance over code points.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// 1 - editDistance / max length, case-insensitive.
inline double string_similarity(std::string_view a, std::string_view b) {
  const std::u32string la = text::lower_u32(a);
  const std::u32string lb = text::lower_u32(b);
  const std::size_t m = std::max(la.size(), lb.size());
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(la, lb)) / static_cast<double>(m);
}

inline SentenceFeatures sentence_features(const std::optional<std::string>& tail,
                                          const std::optional<std::string>& item_label,
                                          const std::optional<std::string>& sitelink_title,
                                          const std::optional<std::string>& prev_tail) {
  const auto sim = [&](const std::optional<std::string>& other) {
    return tail && other ? string_similarity(*tail, *other) : kMissing;
  };
  return {tail ? static_cast<double>(text::utf8_length(*tail)) : 0.0, sim(item_label), sim(sitelink_title),
          sim(prev_tail)};
}

}  // namespace wdvdb
