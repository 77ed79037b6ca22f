// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// Word lists used by the content and context features. Entries are lowercase.
struct Lexicons {
  std::unordered_set<std::string> bad_words;
  std::unordered_set<std::string> language_words;
  std::unordered_set<std::string> latin_languages;  // language codes written in Latin script
  std::unordered_set<std::string> privileged_users;

  static const Lexicons& defaults();
};

namespace lexicon_data {

inline constexpr std::string_view kBadWords[] = {
    "ass",     "asshole", "bastard", "bitch",  "bloody", "bollocks", "boobs",  "bullshit", "butt",
    "crap",    "cunt",    "damn",    "dick",   "dickhead", "dumb",   "fart",     "fuck",
    "fucking", "hate",    "hell",   "idiot",    "jerk",   "lame",     "loser",
    "lol",     "moron",   "nazi",    "penis",  "piss",   "poo",      "poop",   "porn",     "pussy",
    "sex",     "shit",    "slut",   "stinks", "stupid",   "suck",   "sucks",    "turd",
    "ugly",    "vagina",  "wank",    "whore",  "wtf",    "yolo",     "haha",   "hahaha",
};

inline constexpr std::string_view kLanguageWords[] = {
    "arabic",  "chinese", "czech",   "danish",  "deutsch", "dutch",    "english",  "espanol",
    "español", "finnish", "francais", "français", "french", "german",  "greek",    "hebrew",
    "hindi",   "hungarian", "italian", "italiano", "japanese", "korean", "language", "latin",
    "norwegian", "polish", "portuguese", "russian", "spanish", "swedish", "turkish",  "ukrainian",
};

inline constexpr std::string_view kLatinLanguages[] = {
    "af", "ast", "ca", "cs", "cy", "da", "de", "en", "eo", "es", "et", "eu", "fi", "fr", "ga", "gl",
    "hr", "hu", "id", "is", "it", "la", "lt", "lv", "ms", "nb", "nl", "nn", "oc", "pl", "pt", "ro",
    "sk", "sl", "sq", "sv", "sw", "tr", "vi",
};

// Accounts holding rollback rights. The synthetic generator draws its
// privileged editors from this list.
inline constexpr std::string_view kPrivilegedUsers[] = {
    "Admin Aldous", "Admin Beatrix", "Admin Casimir", "Admin Delphine", "Admin Evander",
    "Admin Florin", "Admin Gwendolyn", "Admin Horatio", "Admin Isolde", "Admin Jasper",
};

}  // namespace lexicon_data

inline const Lexicons& Lexicons::defaults() {
  static const Lexicons lex = [] {
    Lexicons l;
    for (auto w : lexicon_data::kBadWords) l.bad_words.emplace(w);
    for (auto w : lexicon_data::kLanguageWords) l.language_words.emplace(w);
    for (auto w : lexicon_data::kLatinLanguages) l.latin_languages.emplace(w);
    for (auto w : lexicon_data::kPrivilegedUsers) l.privileged_users.emplace(text::to_lower_utf8(w));
    return l;
  }();
  return lex;
}

/// One entry per line; blank lines and lines starting with '#' are skipped.
inline std::unordered_set<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open lexicon " + path.string());
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto entry = text::trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    out.insert(text::to_lower_utf8(entry));
  }
  return out;
}

inline bool is_privileged(const Lexicons& lex, std::string_view user_id) {
  return lex.privileged_users.contains(text::to_lower_utf8(user_id));
}

}  // namespace wdvdb
