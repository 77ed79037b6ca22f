// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wdvdb/corpus/labels.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/features/comment.hpp"
#include "wdvdb/features/lexicons.hpp"
#include "wdvdb/util/random.hpp"
#include "wdvdb/util/time.hpp"

namespace wdvdb {

/// Parameters of the synthetic revision stream.
///
/// The stream is a sequence of slots. Each slot either carries a due rollback
/// or a fresh edit. Fresh edits continue one of a few open editing sessions
/// (probability `session_persistence`) or open a new one. A new session is a
/// vandal session with a probability chosen so that about `vandalism_rate` of
/// all revisions end up rolled back. Every vandal session locks its item and
/// is reverted by a privileged account within `rollback_delay_max` slots of
/// its first edit; all of its edits form the rollback's target set.
struct SynthConfig {
  std::int64_t n_revisions = 100000;
  std::int64_t n_users = 3000;
  std::int64_t n_items = 6000;
  double vandalism_rate = 0.01;
  double anon_fraction = 0.3;          // share of regular sessions by anonymous editors
  double badword_inject_prob = 0.6;    // vandal HEAD edits carrying a bad word
  double tag_inject_prob = 0.4;        // vandal edits carrying an abuse-filter tag
  double head_fraction = 0.3;          // share of regular sessions editing the item head
  std::int64_t rollback_delay_max = 200;
  std::uint64_t seed = 42;

  double session_persistence = 0.5;
  double vandal_anon_fraction = 0.75;
  double vandal_head_fraction = 0.55;
  double repeat_vandal_prob = 0.25;
  double body_badword_factor = 0.25;   // scales badword_inject_prob for BODY vandalism
  double tool_tag_rate = 0.15;         // regular edits tagged by a semi-automatic tool
  double false_alarm_tag_rate = 0.003; // regular edits tagged by the abuse filter
  std::int64_t burst_size = 0;         // consecutive rolled-back edits by one reputable user
  double burst_position = 0.96;        // where the burst starts, as a fraction of the stream
  Timestamp start = time::from_civil(2012, 10, 1);
  Timestamp end = time::from_civil(2016, 7, 1);

  void validate() const {
    const auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0,1]");
    };
    if (n_revisions <= 0 || n_users <= 0 || n_items <= 0)
      fail(ErrorCode::InvalidConfig, "n_revisions, n_users and n_items must be positive");
    prob(vandalism_rate, "vandalism_rate");
    prob(anon_fraction, "anon_fraction");
    prob(badword_inject_prob, "badword_inject_prob");
    prob(tag_inject_prob, "tag_inject_prob");
    prob(head_fraction, "head_fraction");
    prob(session_persistence, "session_persistence");
    prob(vandal_anon_fraction, "vandal_anon_fraction");
    prob(vandal_head_fraction, "vandal_head_fraction");
    prob(repeat_vandal_prob, "repeat_vandal_prob");
    prob(body_badword_factor, "body_badword_factor");
    prob(tool_tag_rate, "tool_tag_rate");
    prob(false_alarm_tag_rate, "false_alarm_tag_rate");
    prob(burst_position, "burst_position");
    if (rollback_delay_max < 1) fail(ErrorCode::InvalidConfig, "rollback_delay_max must be at least 1");
    if (burst_size < 0 || burst_size > n_revisions) fail(ErrorCode::InvalidConfig, "burst_size out of range");
    if (start >= end) fail(ErrorCode::InvalidConfig, "start must precede end");
    if (vandalism_rate > 0.5) fail(ErrorCode::InvalidConfig, "vandalism_rate above 0.5 is not supported");
  }
};

struct GeneratedCorpus {
  std::vector<RevisionRecord> revisions;
  GroundTruth truth;
  std::vector<RollbackEvent> rollbacks;
};

namespace synth {

inline constexpr std::string_view kSyllables[] = {
    "ka", "lo", "mi", "ren", "tas", "vel", "dor", "an", "is", "ber", "go", "lin", "mar", "ne", "ostr",
    "pa", "qui", "ra", "sel", "tu", "ul", "vin", "wes", "ya", "zor", "ha", "ju", "ko", "li", "mon",
};

inline constexpr std::string_view kDescriptions[] = {
    "village in Poland",     "American writer",       "species of insect",  "river in Germany",
    "French painter",        "scientific article",    "Wikimedia category", "album by Kalo Ren",
    "commune in France",     "British politician",    "asteroid",           "family name",
    "human settlement",      "Japanese footballer",   "painting",           "mountain in Austria",
};

inline constexpr std::string_view kHeadLanguages[] = {"en", "en", "en", "de", "fr", "es", "it", "nl",
                                                      "sv", "pl", "pt", "ru", "ja", "zh", "ar", "uk"};

struct Location {
  std::string_view continent, country, region, county, city, timezone;
};

inline constexpr Location kLocations[] = {
    {"NA", "US", "California", "Los Angeles County", "Los Angeles", "America/Los_Angeles"},
    {"EU", "DE", "Berlin", "", "Berlin", "Europe/Berlin"},
    {"EU", "GB", "England", "Greater London", "London", "Europe/London"},
    {"EU", "FR", "Ile-de-France", "Paris", "Paris", "Europe/Paris"},
    {"NA", "US", "New York", "Kings County", "Brooklyn", "America/New_York"},
    {"EU", "NL", "North Holland", "", "Amsterdam", "Europe/Amsterdam"},
    {"EU", "PL", "Masovia", "", "Warsaw", "Europe/Warsaw"},
    {"EU", "IT", "Lazio", "Rome", "Rome", "Europe/Rome"},
    {"AS", "JP", "Tokyo", "", "Tokyo", "Asia/Tokyo"},
    {"EU", "SE", "Stockholm", "", "Stockholm", "Europe/Stockholm"},
    {"SA", "BR", "Sao Paulo", "", "Sao Paulo", "America/Sao_Paulo"},
    {"AS", "IN", "Maharashtra", "Mumbai Suburban", "Mumbai", "Asia/Kolkata"},
    {"NA", "US", "Texas", "Harris County", "Houston", "America/Chicago"},
    {"EU", "RU", "Moscow", "", "Moscow", "Europe/Moscow"},
    {"AS", "ID", "Jakarta", "", "Jakarta", "Asia/Jakarta"},
    {"AS", "PH", "Metro Manila", "", "Quezon City", "Asia/Manila"},
    {"NA", "US", "Florida", "Miami-Dade County", "Miami", "America/New_York"},
    {"OC", "AU", "New South Wales", "", "Sydney", "Australia/Sydney"},
    {"AF", "NG", "Lagos", "", "Lagos", "Africa/Lagos"},
    {"AS", "PK", "Punjab", "", "Lahore", "Asia/Karachi"},
};
inline constexpr std::size_t kLocationCount = std::size(kLocations);

inline constexpr std::string_view kAbuseTags[] = {"possible vandalism", "new editor changing label",
                                                  "new editor removing statement", "removal of interwiki link",
                                                  "adding emoji"};
inline constexpr std::string_view kToolTags[] = {"OAuth CID: 1", "OAuth CID: 6", "Wikidata Game",
                                                 "QuickStatements"};

inline constexpr std::string_view kItemProperties[] = {"P31", "P17", "P131", "P27", "P106", "P21",
                                                       "P19", "P20", "P69", "P735", "P734", "P166"};
inline constexpr std::string_view kLiteralProperties[] = {"P569", "P570", "P625", "P1082", "P214", "P227",
                                                          "P496", "P373"};

inline constexpr std::string_view kMashes[] = {"asdfgh", "jjjjjjjj", "qwerty", "lalalala", "xxxxxx", "hiiiiii",
                                               "ooooooo", "blablabla"};

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

inline std::string make_word(SplitMix64& rng, int min_syl, int max_syl) {
  std::string w;
  const auto n = rng.between(min_syl, max_syl);
  for (int i = 0; i < n; ++i) w += kSyllables[rng.below(std::size(kSyllables))];
  return w;
}

inline std::string make_name(SplitMix64& rng) {
  return capitalize(make_word(rng, 1, 3)) + " " + capitalize(make_word(rng, 1, 3));
}

inline std::string upper_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  return s;
}

// Script-shifted rendering of a Latin label, for non-Latin label languages.
inline std::string render_in_script(std::string_view latin, std::string_view lang) {
  char32_t base = 0;
  if (lang == "ru" || lang == "uk") base = 0x430;
  else if (lang == "ja") base = 0x30A2;
  else if (lang == "zh") base = 0x4E00;
  else if (lang == "ar") base = 0x627;
  else return std::string(latin);
  std::string out;
  for (char c : latin) {
    if (c == ' ') out += ' ';
    else if (c >= 'a' && c <= 'z') text::append_utf8(out, base + static_cast<char32_t>(c - 'a'));
    else if (c >= 'A' && c <= 'Z') text::append_utf8(out, base + static_cast<char32_t>(c - 'A'));
  }
  return out;
}

struct Item {
  std::string id;
  std::string label;
  std::optional<std::string> sitelink;
  std::string description;
  bool locked = false;
  std::int64_t last_user = -1;  // index into users_, which grows
};

struct Session {
  std::int64_t user = 0;  // index into the user table
  std::size_t item = 0;
  bool vandal = false;
  bool head = true;
  std::int64_t due = -1;  // rollback slot of a vandal session
};

struct User {
  std::string name;
  bool anonymous = false;
  bool privileged = false;
  std::optional<std::size_t> location;
};

struct PendingRollback {
  std::size_t item = 0;
  std::int64_t vandal = 0;
  std::vector<RevisionId> targets;
  ContentType part = ContentType::Head;
  std::int64_t bytes = 0;
  std::string restored_user;
};

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  GeneratedCorpus run() {
    setup();
    const std::int64_t n = cfg_.n_revisions;
    const std::int64_t burst_begin =
        cfg_.burst_size > 0 ? static_cast<std::int64_t>(cfg_.burst_position * static_cast<double>(n)) : n;
    std::int64_t burst_left = cfg_.burst_size;
    // Expected vandal-session share among new sessions, corrected for rollback slots.
    const double new_vandal_prob = std::min(1.0, cfg_.vandalism_rate * (1.0 + cfg_.vandalism_rate));

    out_.revisions.reserve(static_cast<std::size_t>(n));
    for (slot_ = 0; slot_ < n; ++slot_) {
      if (auto it = pending_.find(slot_); it != pending_.end()) {
        emit_rollback(it->second);
        pending_.erase(it);
        continue;
      }
      // Rollback slots may land inside the burst; it runs until burst_size edits are out.
      if (slot_ >= burst_begin && burst_left > 0) {
        --burst_left;
        emit_burst_edit();
        continue;
      }
      if (!pool_.empty() && rng_.chance(cfg_.session_persistence)) {
        const std::size_t k = rng_.below(pool_.size());
        emit_edit(pool_[k]);
        continue;
      }
      Session s = rng_.chance(new_vandal_prob) ? open_vandal_session() : open_regular_session();
      if (s.vandal && s.due < 0) s = open_regular_session();
      if (pool_.size() == kPoolSize) pool_.pop_front();
      pool_.push_back(s);
      emit_edit(pool_.back());
    }
    out_.truth = label_from_rollbacks(out_.revisions, out_.rollbacks);
    return std::move(out_);
  }

 private:
  static constexpr std::size_t kPoolSize = 4;

  void setup() {
    const auto n_items = static_cast<std::size_t>(cfg_.n_items);
    items_.reserve(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
      Item it;
      it.id = "Q" + std::to_string(1000 + i * 3 + rng_.below(3));
      it.label = make_name(rng_);
      if (rng_.chance(0.7)) it.sitelink = it.label;
      it.description = std::string(kDescriptions[rng_.below(std::size(kDescriptions))]);
      items_.push_back(std::move(it));
    }
    item_popularity_ = DiscreteSampler::zipf(n_items, 0.9);

    const auto n_anon = static_cast<std::int64_t>(std::llround(static_cast<double>(cfg_.n_users) * cfg_.anon_fraction));
    const std::int64_t n_reg = std::max<std::int64_t>(1, cfg_.n_users - n_anon);
    for (std::int64_t i = 0; i < n_reg; ++i) registered_.push_back(add_user("Editor" + std::to_string(i + 1), false));
    regular_locations_ = DiscreteSampler::zipf(kLocationCount, 1.1);
    std::vector<double> vandal_w(kLocationCount);
    for (std::size_t i = 0; i < kLocationCount; ++i) vandal_w[i] = 1.0 / (1.0 + 0.35 * static_cast<double>(kLocationCount - 1 - i));
    vandal_locations_ = DiscreteSampler(vandal_w);
    for (std::int64_t i = 0; i < std::max<std::int64_t>(1, n_anon); ++i) anonymous_.push_back(add_ip(false));
    for (auto name : lexicon_data::kPrivilegedUsers) {
      const auto idx = add_user(std::string(name), false);
      users_[static_cast<std::size_t>(idx)].privileged = true;
      privileged_.push_back(idx);
    }
    registered_popularity_ = DiscreteSampler::zipf(registered_.size(), 1.0);
    anonymous_popularity_ = DiscreteSampler::zipf(anonymous_.size(), 0.5);
    value_popularity_ = DiscreteSampler::zipf(200, 1.2);
  }

  std::int64_t add_user(std::string name, bool anonymous) {
    users_.push_back({std::move(name), anonymous, false, std::nullopt});
    return static_cast<std::int64_t>(users_.size() - 1);
  }

  std::int64_t add_ip(bool vandal) {
    std::string ip;
    do {
      ip.clear();
      for (int k = 0; k < 4; ++k) {
        if (k) ip += '.';
        ip += std::to_string(k == 0 ? 1 + rng_.below(223) : rng_.below(256));
      }
    } while (!used_ips_.insert(ip).second);
    const auto idx = add_user(std::move(ip), true);
    users_[static_cast<std::size_t>(idx)].location = vandal ? vandal_locations_(rng_) : regular_locations_(rng_);
    return idx;
  }

  std::size_t pick_item(bool uniform) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const std::size_t i = uniform ? rng_.below(items_.size()) : item_popularity_(rng_);
      if (!items_[i].locked) return i;
    }
    const std::size_t start = rng_.below(items_.size());
    for (std::size_t k = 0; k < items_.size(); ++k) {
      const std::size_t i = (start + k) % items_.size();
      if (!items_[i].locked) return i;
    }
    return start;  // every item locked: only possible for tiny item counts
  }

  // A free slot in (slot_, slot_ + rollback_delay_max], or -1.
  std::int64_t reserve_rollback_slot() {
    const std::int64_t d = rng_.between(1, cfg_.rollback_delay_max);
    for (std::int64_t k = 0; k < cfg_.rollback_delay_max; ++k) {
      const std::int64_t off = ((d - 1 + k) % cfg_.rollback_delay_max) + 1;
      const std::int64_t s = slot_ + off;
      if (s >= cfg_.n_revisions) continue;
      if (!pending_.contains(s)) return s;
    }
    return -1;
  }

  Session open_regular_session() {
    Session s;
    if (rng_.chance(0.03)) {
      s.user = privileged_[rng_.below(privileged_.size())];
    } else if (rng_.chance(cfg_.anon_fraction)) {
      s.user = anonymous_[anonymous_popularity_(rng_)];
    } else {
      s.user = registered_[registered_popularity_(rng_)];
    }
    s.item = pick_item(false);
    s.head = rng_.chance(cfg_.head_fraction);
    return s;
  }

  Session open_vandal_session() {
    Session s;
    s.vandal = true;
    if (!vandals_.empty() && rng_.chance(cfg_.repeat_vandal_prob)) {
      s.user = vandals_[rng_.below(vandals_.size())];
    } else if (rng_.chance(0.08)) {
      s.user = registered_[rng_.below(registered_.size())];
    } else if (rng_.chance(cfg_.vandal_anon_fraction)) {
      s.user = add_ip(true);
      vandals_.push_back(s.user);
    } else {
      s.user = add_user("Newcomer" + std::to_string(++newcomers_), false);
      vandals_.push_back(s.user);
    }
    s.item = pick_item(false);
    s.head = rng_.chance(cfg_.vandal_head_fraction);
    s.due = reserve_rollback_slot();
    if (s.due < 0) return s;
    Item& item = items_[s.item];
    item.locked = true;
    // Open sessions of other users on the item would interleave with the vandal.
    std::erase_if(pool_, [&](const Session& o) { return o.item == s.item; });
    PendingRollback pr;
    pr.item = s.item;
    pr.vandal = s.user;
    pr.part = s.head ? ContentType::Head : ContentType::Body;
    pr.restored_user = item.last_user >= 0 ? users_[static_cast<std::size_t>(item.last_user)].name
                                            : std::string(lexicon_data::kPrivilegedUsers[0]);
    pending_.emplace(s.due, std::move(pr));
    return s;
  }

  RevisionId next_id() {
    last_id_ += 1 + static_cast<RevisionId>(rng_.below(3));
    return last_id_;
  }

  Timestamp timestamp_for_slot() {
    // Revisions per unit time grow quadratically over the covered period.
    const double u = (static_cast<double>(slot_) + rng_.uniform()) / static_cast<double>(cfg_.n_revisions);
    const double span = static_cast<double>(cfg_.end - cfg_.start);
    auto t = cfg_.start + static_cast<Timestamp>(std::floor(span * std::cbrt(u)));
    t = std::min(t, cfg_.end - 1);
    last_ts_ = std::max(last_ts_, t);
    return last_ts_;
  }

  RevisionRecord base_record(const User& u, Item& item, ContentType part) {
    RevisionRecord r;
    r.revision_id = next_id();
    r.timestamp = timestamp_for_slot();
    r.item_id = item.id;
    r.user_id = u.name;
    r.is_privileged = u.privileged;
    r.content_type = part;
    if (u.anonymous && u.location) {
      const Location& l = kLocations[*u.location];
      r.geo = GeoInfo{std::string(l.continent), std::string(l.country), std::string(l.region),
                      std::string(l.county),    std::string(l.city),    std::string(l.timezone)};
    }
    r.item_label = item.label;
    r.sitelink_title = item.sitelink;
    return r;
  }

  void finish(RevisionRecord r, Item& item) {
    std::sort(r.tags.begin(), r.tags.end());
    r.tags.erase(std::unique(r.tags.begin(), r.tags.end()), r.tags.end());
    item.last_user = user_index_.at(r.user_id);
    out_.revisions.push_back(std::move(r));
  }

  void regular_tags(RevisionRecord& r) {
    if (rng_.chance(cfg_.tool_tag_rate)) r.tags.emplace_back(kToolTags[rng_.below(std::size(kToolTags))]);
    if (rng_.chance(cfg_.false_alarm_tag_rate)) r.tags.emplace_back(kAbuseTags[rng_.below(std::size(kAbuseTags))]);
  }

  std::string bad_word() {
    return std::string(lexicon_data::kBadWords[rng_.below(std::size(lexicon_data::kBadWords))]);
  }

  void emit_edit(Session& s) {
    const User& u = users_[static_cast<std::size_t>(s.user)];
    user_index_.try_emplace(u.name, s.user);
    Item& item = items_[s.item];
    const ContentType part = s.head ? ContentType::Head : ContentType::Body;
    RevisionRecord r = base_record(u, item, part);
    ParsedComment c;
    c.count = 1;
    if (s.head) {
      if (s.vandal) vandal_head(r, c, item);
      else regular_head(r, c, item);
    } else {
      if (s.vandal) vandal_body(r, c);
      else regular_body(r, c, item);
    }
    r.comment = format_comment(c);
    if (s.vandal) {
      if (rng_.chance(cfg_.tag_inject_prob)) r.tags.emplace_back(kAbuseTags[rng_.below(std::size(kAbuseTags))]);
      if (rng_.chance(0.1)) r.tags.emplace_back("mobile edit");
      auto& pr = pending_.at(s.due);
      pr.targets.push_back(r.revision_id);
      pr.bytes += r.bytes_changed;
    } else {
      regular_tags(r);
    }
    finish(std::move(r), item);
  }

  void regular_head(RevisionRecord& r, ParsedComment& c, const Item& item) {
    const double x = rng_.uniform();
    const std::string_view lang = kHeadLanguages[rng_.below(std::size(kHeadLanguages))];
    c.language = std::string(lang);
    if (x < 0.45) {
      c.action = "wbsetlabel";
      c.subaction = rng_.chance(0.7) ? "add" : "set";
      c.tail = render_in_script(item.label, lang);
    } else if (x < 0.75) {
      c.action = "wbsetdescription";
      c.subaction = rng_.chance(0.7) ? "add" : "set";
      c.tail = item.description;
    } else if (x < 0.9) {
      c.action = "wbsetaliases";
      c.subaction = "add";
      c.tail = item.label.substr(0, item.label.find(' ')) + " " + capitalize(make_word(rng_, 1, 2));
    } else {
      c.action = "wbeditentity";
      c.subaction = "update";
      c.count = 0;
      c.language.reset();
    }
    r.bytes_changed = 40 + static_cast<std::int64_t>(c.tail ? c.tail->size() : 200) * 2 + rng_.between(-10, 30);
  }

  void regular_body(RevisionRecord& r, ParsedComment& c, const Item& item) {
    const double x = rng_.uniform();
    if (x < 0.12 && item.sitelink) {
      c.action = "wbsetsitelink";
      c.subaction = "add";
      c.language = "enwiki";
      c.tail = *item.sitelink;
      r.bytes_changed = 80 + static_cast<std::int64_t>(item.sitelink->size()) + rng_.between(0, 40);
      return;
    }
    const bool item_valued = rng_.chance(0.6);
    const bool remove = rng_.chance(0.06);
    c.action = remove ? "wbremoveclaims" : (rng_.chance(0.5) ? "wbcreateclaim" : "wbsetclaim");
    c.subaction = remove ? "remove" : (c.action == "wbsetclaim" && rng_.chance(0.3) ? "update" : "create");
    if (c.action == "wbsetclaim") c.param = "1";
    if (item_valued) {
      const std::string pid(kItemProperties[value_popularity_(rng_) % std::size(kItemProperties)]);
      const std::string value = "Q" + std::to_string(1 + value_popularity_(rng_) * 17);
      r.property_id = pid;
      r.value_item = value;
      c.tail = "[[Property:" + pid + "]]: [[" + value + "]]";
    } else {
      const std::string pid(kLiteralProperties[rng_.below(std::size(kLiteralProperties))]);
      std::string value;
      if (pid == "P569" || pid == "P570")
        value = std::to_string(rng_.between(1850, 2010)) + "-0" + std::to_string(rng_.between(1, 9)) + "-1" +
                std::to_string(rng_.between(0, 9));
      else if (pid == "P1082") value = std::to_string(rng_.between(100, 900000));
      else if (pid == "P373") value = item.label;
      else value = std::to_string(rng_.between(10000000, 99999999));
      r.property_id = pid;
      r.value_literal = value;
      c.tail = "[[Property:" + pid + "]]: " + value;
    }
    r.bytes_changed = remove ? -rng_.between(300, 900) : rng_.between(300, 1100);
  }

  void vandal_head(RevisionRecord& r, ParsedComment& c, const Item& item) {
    c.action = rng_.chance(0.6) ? "wbsetlabel" : (rng_.chance(0.7) ? "wbsetdescription" : "wbsetaliases");
    c.subaction = c.action == "wbsetaliases" ? "add" : "set";
    c.language = rng_.chance(0.8) ? "en" : std::string(kHeadLanguages[rng_.below(std::size(kHeadLanguages))]);
    std::string tail;
    if (rng_.chance(cfg_.badword_inject_prob)) {
      switch (rng_.below(4)) {
        case 0: tail = item.label + " is " + bad_word(); break;
        case 1: tail = bad_word() + " " + bad_word(); break;
        case 2: tail = capitalize(make_word(rng_, 1, 2)) + " " + bad_word(); break;
        default: tail = upper_ascii(bad_word()) + " " + item.label; break;
      }
    } else {
      switch (rng_.below(5)) {
        case 0: tail = upper_ascii(item.label); break;
        case 1: tail = std::string(kMashes[rng_.below(std::size(kMashes))]); break;
        case 2: tail = make_name(rng_); break;
        case 3: tail = "I love " + make_name(rng_) + "!!!"; break;
        default: tail = item.label + " " + std::to_string(rng_.between(1, 999)); break;
      }
    }
    c.tail = tail;
    r.bytes_changed = rng_.chance(0.3) ? -rng_.between(100, 1500) : rng_.between(5, 120);
  }

  void vandal_body(RevisionRecord& r, ParsedComment& c) {
    const double x = rng_.uniform();
    if (x < 0.25) {
      c.action = "wbremoveclaims";
      c.subaction = "remove";
      const std::string pid(kItemProperties[rng_.below(std::size(kItemProperties))]);
      r.property_id = pid;
      c.tail = "[[Property:" + pid + "]]: [[Q" + std::to_string(1 + rng_.below(200) * 17) + "]]";
      r.bytes_changed = -rng_.between(400, 4000);
      return;
    }
    if (x < 0.35) {
      c.action = "wbsetsitelink";
      c.subaction = "set";
      c.language = "enwiki";
      c.tail = rng_.chance(cfg_.badword_inject_prob * cfg_.body_badword_factor) ? bad_word() + " " + make_word(rng_, 1, 2)
                                                                                : make_name(rng_);
      r.bytes_changed = rng_.between(-50, 50);
      return;
    }
    c.action = rng_.chance(0.5) ? "wbsetclaim" : "wbcreateclaim";
    c.subaction = rng_.chance(0.5) ? "update" : "create";
    if (c.action == "wbsetclaim") c.param = "1";
    if (rng_.chance(0.55)) {
      const std::string pid(kItemProperties[rng_.below(std::size(kItemProperties))]);
      const std::string value = "Q" + std::to_string(1 + rng_.below(90'000'000));
      r.property_id = pid;
      r.value_item = value;
      c.tail = "[[Property:" + pid + "]]: [[" + value + "]]";
    } else {
      const std::string pid(kLiteralProperties[rng_.below(std::size(kLiteralProperties))]);
      std::string value = rng_.chance(cfg_.badword_inject_prob * cfg_.body_badword_factor)
                              ? bad_word()
                              : std::to_string(rng_.between(-99999, 99999));
      r.property_id = pid;
      r.value_literal = value;
      c.tail = "[[Property:" + pid + "]]: " + value;
    }
    r.bytes_changed = rng_.between(100, 1200);
  }

  void emit_burst_edit() {
    if (burst_user_ < 0) burst_user_ = registered_[0];
    const User& u = users_[static_cast<std::size_t>(burst_user_)];
    user_index_.try_emplace(u.name, burst_user_);
    const std::size_t idx = pick_item(true);
    Item& item = items_[idx];
    RevisionRecord r = base_record(u, item, ContentType::Body);
    ParsedComment c;
    c.action = "wbcreateclaim";
    c.subaction = "create";
    c.count = 1;
    r.property_id = "P569";
    r.value_literal = std::to_string(rng_.between(1900, 1999)) + "-01-01";
    c.tail = "[[Property:P569]]: " + *r.value_literal;
    r.comment = format_comment(c);
    r.bytes_changed = rng_.between(400, 700);
    r.tags.emplace_back("QuickStatements");

    const std::int64_t due = reserve_rollback_slot();
    if (due >= 0) {
      item.locked = true;
      std::erase_if(pool_, [&](const Session& o) { return o.item == idx; });
      PendingRollback pr;
      pr.item = idx;
      pr.vandal = burst_user_;
      pr.part = ContentType::Body;
      pr.restored_user = item.last_user >= 0 ? users_[static_cast<std::size_t>(item.last_user)].name
                                            : std::string(lexicon_data::kPrivilegedUsers[0]);
      pr.targets.push_back(r.revision_id);
      pr.bytes = r.bytes_changed;
      pending_.emplace(due, std::move(pr));
    }
    finish(std::move(r), item);
  }

  void emit_rollback(const PendingRollback& pr) {
    Item& item = items_[pr.item];
    const std::int64_t admin = privileged_[rng_.below(privileged_.size())];
    const User& u = users_[static_cast<std::size_t>(admin)];
    user_index_.try_emplace(u.name, admin);
    RevisionRecord r = base_record(u, item, pr.part);
    r.comment = format_rollback_comment(users_[static_cast<std::size_t>(pr.vandal)].name, pr.restored_user);
    r.bytes_changed = -pr.bytes;
    const RevisionId id = r.revision_id;
    item.locked = false;
    std::erase_if(pool_, [&](const Session& o) { return o.item == pr.item && o.vandal; });
    finish(std::move(r), item);
    out_.rollbacks.push_back({id, pr.targets});
  }

  SynthConfig cfg_;
  SplitMix64 rng_;
  GeneratedCorpus out_;
  std::vector<Item> items_;
  std::vector<User> users_;
  std::unordered_map<std::string, std::int64_t> user_index_;
  std::unordered_set<std::string> used_ips_;
  std::vector<std::int64_t> registered_, anonymous_, privileged_, vandals_;
  DiscreteSampler item_popularity_, registered_popularity_, anonymous_popularity_, value_popularity_;
  DiscreteSampler regular_locations_, vandal_locations_;
  std::deque<Session> pool_;
  std::map<std::int64_t, PendingRollback> pending_;
  std::int64_t slot_ = 0;
  std::int64_t newcomers_ = 0;
  std::int64_t burst_user_ = -1;
  RevisionId last_id_ = 300'000'000;
  Timestamp last_ts_ = 0;
};

}  // namespace synth

/// Deterministic for a fixed config: equal seeds give byte-identical corpora.
inline GeneratedCorpus generate_corpus(const SynthConfig& config) {
  config.validate();
  return synth::Generator(config).run();
}

}  // namespace wdvdb
