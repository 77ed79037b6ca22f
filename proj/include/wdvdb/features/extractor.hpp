// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/features/comment.hpp"
#include "wdvdb/features/lexicons.hpp"
#include "wdvdb/features/state.hpp"
#include "wdvdb/features/text_features.hpp"
#include "wdvdb/util/time.hpp"

namespace wdvdb {

inline constexpr std::array<std::string_view, 3> kStatementFeatureNames = {
    "propertyFrequency", "itemValueFrequency", "literalValueFrequency"};

inline constexpr std::array<std::string_view, 21> kContextFeatureNames = {
    "isRegisteredUser",      "isPrivilegedUser",     "userFrequency",         "cumUserUniqueItems",
    "userUniqueItems",       "userVandalismFraction", "userVandalismCount",   "itemFrequency",
    "itemUniqueUsers",       "logItemFrequency",     "logCumItemUniqueUsers", "itemVandalismFraction",
    "itemVandalismCount",    "commentLength",        "isLatinLanguage",       "positionWithinSession",
    "changeCount",           "revisionSize",         "isMinorRevision",       "hourOfDay",
    "dayOfWeek",
};

inline constexpr std::array<std::string_view, 10> kCategoricalFeatureNames = {
    "userContinent", "userCountry",      "userRegion",        "userCounty",        "userCity",
    "userTimeZone",  "revisionLanguage", "revisionAction",    "revisionSubaction", "revisionPrevAction",
};

inline constexpr std::string_view kTagFeatureName = "revisionTags";

inline constexpr std::size_t kNumericFeatureCount = kCharacterFeatureNames.size() + kWordFeatureNames.size() +
                                                    kSentenceFeatureNames.size() +
                                                    kStatementFeatureNames.size() + kContextFeatureNames.size();
inline constexpr std::size_t kCategoricalFeatureCount = kCategoricalFeatureNames.size();

/// Numeric feature names in FeatureVector::numeric order.
inline const std::vector<std::string>& numeric_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto n : kCharacterFeatureNames) v.emplace_back(n);
    for (auto n : kWordFeatureNames) v.emplace_back(n);
    for (auto n : kSentenceFeatureNames) v.emplace_back(n);
    for (auto n : kStatementFeatureNames) v.emplace_back(n);
    for (auto n : kContextFeatureNames) v.emplace_back(n);
    return v;
  }();
  return names;
}

/// Raw, not yet encoded features of one revision.
struct FeatureVector {
  RevisionId revision_id = 0;
  std::array<double, kNumericFeatureCount> numeric{};
  std::array<std::optional<std::string>, kCategoricalFeatureCount> categorical;
  std::vector<std::string> tags;

  double get(std::string_view name) const {
    const auto& names = numeric_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return numeric[i];
    fail(ErrorCode::Usage, "unknown feature " + std::string(name));
  }
};

/// Equality that treats the missing marker as equal to itself, bit by bit.
inline bool bit_equal(const FeatureVector& a, const FeatureVector& b) {
  return a.revision_id == b.revision_id &&
         std::memcmp(a.numeric.data(), b.numeric.data(), sizeof(double) * kNumericFeatureCount) == 0 &&
         a.categorical == b.categorical && a.tags == b.tags;
}

class FeatureExtractor {
 public:
  explicit FeatureExtractor(const Lexicons& lexicons = Lexicons::defaults()) : lex_(&lexicons) {}

  const CumulativeState& state() const noexcept { return state_; }

  /// Features of `r` given the revisions seen so far. Does not change state.
  FeatureVector extract(const RevisionRecord& r) const { return compute(r, parse_comment(r.comment)); }

  FeatureVector extract_and_update(const RevisionRecord& r) {
    check_order(r);
    const ParsedComment parsed = parse_comment(r.comment);
    FeatureVector v = compute(r, parsed);
    state_.update(r, parsed);
    return v;
  }

  /// Folds `r` into the state without computing its features.
  void observe(const RevisionRecord& r) {
    check_order(r);
    state_.update(r, parse_comment(r.comment));
  }

 private:
  void check_order(const RevisionRecord& r) const {
    if (const auto last = state_.last_id(); last && r.revision_id <= *last)
      fail(ErrorCode::OutOfOrder,
           "revision " + std::to_string(r.revision_id) + " after " + std::to_string(*last), r.revision_id);
  }

  FeatureVector compute(const RevisionRecord& r, const ParsedComment& c) const {
    FeatureVector v;
    v.revision_id = r.revision_id;
    std::size_t k = 0;
    const auto put = [&](double x) { v.numeric[k++] = x; };
    const auto opt = [](const std::optional<double>& x) { return x ? *x : kMissing; };

    const ItemState* item = state_.item(r.item_id);
    const UserState* user = state_.user(r.user_id);

    for (double x : character_features(c.tail)) put(x);
    for (double x : word_features(c.tail, *lex_)) put(x);
    for (double x : sentence_features(c.tail, r.item_label, r.sitelink_title, item ? item->prev_tail : std::nullopt))
      put(x);

    if (r.property_id) {
      put(opt(state_.properties().frequency(r.property_id)));
      put(opt(state_.value_items().frequency(r.value_item)));
      put(opt(state_.value_literals().frequency(r.value_literal)));
    } else {
      put(kMissing);
      put(kMissing);
      put(kMissing);
    }

    const double user_revs = user ? static_cast<double>(user->revisions) : 0.0;
    const double user_items = user ? static_cast<double>(user->items.size()) : 0.0;
    const double user_vandal = user ? static_cast<double>(user->vandalism) : 0.0;
    const double item_revs = item ? static_cast<double>(item->revisions) : 0.0;
    const double item_users = item ? static_cast<double>(item->users.size()) : 0.0;
    const double item_vandal = item ? static_cast<double>(item->vandalism) : 0.0;

    put(is_anonymous_user(r.user_id) ? 0.0 : 1.0);
    put(r.is_privileged || is_privileged(*lex_, r.user_id) ? 1.0 : 0.0);
    put(user_revs);
    put(user_items);
    put(user_items);
    put(user_revs > 0 ? user_vandal / user_revs : kMissing);
    put(user_revs > 0 ? user_vandal : kMissing);
    put(item_revs);
    put(item_users);
    put(std::log1p(item_revs));
    put(std::log1p(item_users));
    put(item_revs > 0 ? item_vandal / item_revs : kMissing);
    put(item_revs > 0 ? item_vandal : kMissing);
    put(static_cast<double>(text::utf8_length(r.comment)));
    put(c.language ? (lex_->latin_languages.contains(*c.language) ? 1.0 : 0.0) : kMissing);
    put(static_cast<double>(state_.session_position(r)));
    put(c.count ? static_cast<double>(*c.count) : kMissing);
    put(static_cast<double>(r.bytes_changed));
    put(std::llabs(r.bytes_changed) < 10 ? 1.0 : 0.0);
    put(static_cast<double>(time::hour_of_day(r.timestamp)));
    put(static_cast<double>(time::day_of_week(r.timestamp)));

    const auto non_empty = [](const std::string& s) -> std::optional<std::string> {
      if (s.empty()) return std::nullopt;
      return s;
    };
    if (r.geo) {
      v.categorical[0] = non_empty(r.geo->continent);
      v.categorical[1] = non_empty(r.geo->country);
      v.categorical[2] = non_empty(r.geo->region);
      v.categorical[3] = non_empty(r.geo->county);
      v.categorical[4] = non_empty(r.geo->city);
      v.categorical[5] = non_empty(r.geo->timezone);
    }
    v.categorical[6] = c.language;
    v.categorical[7] = c.action;
    v.categorical[8] = c.subaction;
    v.categorical[9] = item ? item->prev_action : std::nullopt;
    v.tags = r.tags;
    return v;
  }

  const Lexicons* lex_;
  CumulativeState state_;
};

/// Features of every revision, extracted in stream order.
inline std::vector<FeatureVector> extract_all(std::span<const RevisionRecord> revisions,
                                              const Lexicons& lexicons = Lexicons::defaults()) {
  FeatureExtractor fx(lexicons);
  std::vector<FeatureVector> out;
  out.reserve(revisions.size());
  for (const auto& r : revisions) out.push_back(fx.extract_and_update(r));
  return out;
}

}  // namespace wdvdb
