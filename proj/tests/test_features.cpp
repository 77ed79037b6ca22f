// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace wdvdb;
using wdvdb::testing::revision;
using Catch::Approx;

namespace {

// Full-matrix Levenshtein, kept deliberately separate from the rolling-row version.
std::size_t levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] != b[j - 1]);
      d[i][j] = std::min(sub, std::min(d[i - 1][j], d[i][j - 1]) + 1);
    }
  return d[a.size()][b.size()];
}

double feature(const FeatureVector& v, std::string_view name) { return v.get(name); }

Lexicons crap_only() {
  Lexicons lex = Lexicons::defaults();
  lex.bad_words = {"crap"};
  return lex;
}

}  // namespace

TEST_CASE("comment grammar") {
  const auto a = parse_comment("/* wbsetlabel-set:1|en */ Hello");
  REQUIRE(a.action == "wbsetlabel");
  REQUIRE(a.subaction == "set");
  REQUIRE(a.count == 1);
  REQUIRE(a.language == "en");
  REQUIRE(a.tail == "Hello");
  REQUIRE_FALSE(a.param.has_value());

  const auto b = parse_comment("free text");
  REQUIRE_FALSE(b.action.has_value());
  REQUIRE(b.tail == "free text");

  const auto c = parse_comment("/* wbeditentity-update:0| */");
  REQUIRE(c.action == "wbeditentity");
  REQUIRE(c.subaction == "update");
  REQUIRE_FALSE(c.language.has_value());
  REQUIRE_FALSE(c.tail.has_value());

  const auto d = parse_comment("/* wbsetclaim-create:2||1 */ [[Property:P31]]: [[Q5]]");
  REQUIRE(d.param == "1");
  REQUIRE(d.count == 2);

  REQUIRE_FALSE(parse_comment("").tail.has_value());
  REQUIRE_FALSE(parse_comment("/* Bad-set:1|en */ x").action.has_value());
  REQUIRE_FALSE(parse_comment("/* wbsetlabel:01|en */ x").action.has_value());
  REQUIRE(parse_comment("/* wbsetlabel:1|en */x").tail == "/* wbsetlabel:1|en */x");
}

TEST_CASE("conforming comments re-serialize exactly") {
  SplitMix64 rng(21);
  const std::vector<std::string> actions = {"wbsetlabel", "wbcreateclaim", "wbeditentity", "wbsetsitelink"};
  const std::vector<std::string> subs = {"", "set", "add", "update", "create-x"};
  const std::vector<std::string> langs = {"", "en", "de", "zh-hans"};
  const std::vector<std::string> tails = {"", "Berlin", "[[Property:P31]]: [[Q5]]", "a  b"};
  for (int i = 0; i < 2000; ++i) {
    ParsedComment c;
    c.action = actions[rng.below(actions.size())];
    if (const auto& s = subs[rng.below(subs.size())]; !s.empty()) c.subaction = s;
    c.count = static_cast<std::int64_t>(rng.below(5));
    if (const auto& l = langs[rng.below(langs.size())]; !l.empty()) c.language = l;
    if (rng.chance(0.3)) c.param = rng.chance(0.5) ? "" : "1";
    if (const auto& t = tails[rng.below(tails.size())]; !t.empty()) c.tail = t;
    const std::string text = format_comment(c);
    REQUIRE(parse_comment(text) == c);
    REQUIRE(format_comment(parse_comment(text)) == text);
  }
}

TEST_CASE("parse_comment tolerates arbitrary bytes") {
  SplitMix64 rng(2);
  const std::string alphabet = "/* -:|abc019\xc3\xa9";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const auto len = rng.below(30);
    for (std::uint64_t j = 0; j < len; ++j) s += alphabet[rng.below(alphabet.size())];
    const auto p = parse_comment(s);
    if (p.tail) REQUIRE_FALSE(p.tail->empty());
    if (p.action) REQUIRE_FALSE(p.action->empty());
  }
}

TEST_CASE("rollback comments name the reverted editor") {
  const std::string c = format_rollback_comment("1.2.3.4", "Alice");
  REQUIRE(rollback_target(c) == "1.2.3.4");
  REQUIRE_FALSE(rollback_target("Reverted something").has_value());
}

TEST_CASE("character features") {
  const auto f = character_features(std::string("AAbb12"));
  REQUIRE(f[0] == Approx(2.0 / 6));  // lowerCaseRatio
  REQUIRE(f[1] == Approx(2.0 / 6));  // upperCaseRatio
  REQUIRE(f[5] == Approx(2.0 / 6));  // digitRatio
  REQUIRE(f[4] == 1.0);              // alphanumericRatio
  REQUIRE(f[3] == 1.0);              // latinRatio
  REQUIRE(character_features(std::string("aaabb"))[8] == 3.0);
  for (double x : character_features(std::nullopt)) REQUIRE(is_missing(x));
  const auto digits = character_features(std::string("123"));
  REQUIRE(is_missing(digits[2]));
  REQUIRE(is_missing(digits[3]));
  const auto cyr = character_features(std::string("\xd0\x9f\xd1\x80\xd0\xb8 ab"));  // "При ab"
  REQUIRE(cyr[2] == Approx(3.0 / 5));
}

TEST_CASE("character ratios stay in range on generated comments") {
  const auto g = wdvdb::testing::small_corpus(3000, 8);
  for (const auto& r : g.revisions) {
    const auto f = character_features(parse_comment(r.comment).tail);
    if (is_missing(f[0])) continue;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i == 8 || is_missing(f[i])) continue;
      REQUIRE(f[i] >= 0.0);
      REQUIRE(f[i] <= 1.0);
    }
    REQUIRE(f[0] + f[1] + f[5] + f[6] + f[7] <= 1.0 + 1e-12);
  }
}

TEST_CASE("word features") {
  const Lexicons lex = crap_only();
  REQUIRE(word_features(std::string("this is crap"), lex)[5] == Approx(1.0 / 3));
  REQUIRE(word_features(std::string("see https://x.y"), lex)[4] == 1.0);
  REQUIRE(word_features(std::string("see x.y"), lex)[4] == 0.0);
  REQUIRE(word_features(std::string("Q42 added"), lex)[6] == Approx(0.5));
  REQUIRE(word_features(std::string("[[Q1]] and [[Q2]]"), lex)[8] == Approx(2.0 / 3));
  const auto w = word_features(std::string("HELLO english world"), lex);
  REQUIRE(w[0] == Approx(1.0 / 3));  // languageWordRatio
  REQUIRE(w[1] == 1.0);
  REQUIRE(w[2] == Approx(2.0 / 3));
  REQUIRE(w[7] == Approx(1.0 / 3));
  REQUIRE(w[3] == 7.0);
  const auto none = word_features(std::string("123 456"), lex);
  REQUIRE(is_missing(none[5]));
  REQUIRE(none[6] == 0.0);
}

TEST_CASE("string similarity matches a full-matrix edit distance") {
  REQUIRE(string_similarity("foo", "foo") == 1.0);
  REQUIRE(string_similarity("kitten", "sitting") == Approx(1.0 - 3.0 / 7).epsilon(1e-12));
  REQUIRE(string_similarity("Berlin", "berlin") == 1.0);

  SplitMix64 rng(17);
  const std::u32string alphabet = U"abcxyé中";
  for (int i = 0; i < 1000; ++i) {
    std::u32string a, b;
    for (auto n = rng.below(12); n > 0; --n) a += alphabet[rng.below(alphabet.size())];
    for (auto n = rng.below(12); n > 0; --n) b += alphabet[rng.below(alphabet.size())];
    REQUIRE(edit_distance(a, b) == levenshtein_oracle(a, b));
  }
}

TEST_CASE("sentence features") {
  const auto s = sentence_features(std::string("kitten"), std::string("sitting"), std::nullopt, std::string("kitten"));
  REQUIRE(s[0] == 6.0);
  REQUIRE(s[1] == Approx(4.0 / 7));
  REQUIRE(is_missing(s[2]));
  REQUIRE(s[3] == 1.0);
  REQUIRE(sentence_features(std::nullopt, std::string("x"), std::nullopt, std::nullopt)[0] == 0.0);
}

TEST_CASE("statement frequencies use prior statement edits only") {
  FeatureExtractor fx;
  RevisionId id = 1;
  const auto statement = [&](const std::string& pid) {
    const RevisionId rid = id++;
    RevisionRecord r = revision(rid, "Q" + std::to_string(rid), "Alice", "/* wbcreateclaim-create:1| */ [[Property:" + pid + "]]");
    r.content_type = ContentType::Body;
    r.property_id = pid;
    r.value_item = "Q5";
    return r;
  };
  const auto first = fx.extract_and_update(statement("P31"));
  REQUIRE(is_missing(feature(first, "propertyFrequency")));
  fx.observe(statement("P31"));
  fx.observe(statement("P21"));
  fx.observe(statement("P31"));
  const auto v = fx.extract_and_update(statement("P31"));
  REQUIRE(feature(v, "propertyFrequency") == 0.75);
  REQUIRE(feature(v, "itemValueFrequency") == 1.0);
  REQUIRE(is_missing(feature(v, "literalValueFrequency")));
  const auto head = fx.extract(revision(id++, "Q1", "Alice"));
  REQUIRE(is_missing(feature(head, "propertyFrequency")));
  REQUIRE(is_missing(feature(head, "itemValueFrequency")));
}

TEST_CASE("context features") {
  FeatureExtractor fx;
  const auto v1 = fx.extract_and_update(revision(1, "Q1", "Alice"));
  REQUIRE(feature(v1, "logItemFrequency") == 0.0);
  REQUIRE(feature(v1, "userFrequency") == 0.0);
  REQUIRE(is_missing(feature(v1, "userVandalismFraction")));
  REQUIRE(feature(v1, "positionWithinSession") == 1.0);
  REQUIRE(feature(v1, "isRegisteredUser") == 1.0);
  REQUIRE(feature(v1, "isLatinLanguage") == 1.0);

  fx.observe(revision(2, "Q1", "Alice"));
  const auto v3 = fx.extract_and_update(revision(3, "Q1", "Alice"));
  REQUIRE(feature(v3, "userFrequency") == 2.0);
  REQUIRE(feature(v3, "positionWithinSession") == 3.0);
  REQUIRE(feature(v3, "logItemFrequency") == Approx(std::log(3.0)));
  REQUIRE(feature(v3, "cumUserUniqueItems") == 1.0);

  RevisionRecord anon = revision(4, "Q2", "10.1.2.3", "/* wbsetlabel-set:1|de */ x", time::from_civil(2016, 5, 1, 13));
  anon.geo = GeoInfo{"EU", "DE", "", "", "Berlin", "Europe/Berlin"};
  anon.bytes_changed = -4;
  const auto v4 = fx.extract_and_update(anon);
  REQUIRE(feature(v4, "isRegisteredUser") == 0.0);
  REQUIRE(feature(v4, "isMinorRevision") == 1.0);
  REQUIRE(feature(v4, "revisionSize") == -4.0);
  REQUIRE(feature(v4, "hourOfDay") == 13.0);
  REQUIRE(feature(v4, "dayOfWeek") == 6.0);
  REQUIRE(feature(v4, "changeCount") == 1.0);
  REQUIRE(v4.categorical[4] == "Berlin");
  REQUIRE_FALSE(v4.categorical[2].has_value());
  REQUIRE(v4.categorical[6] == "de");

  // Revert of Alice's session on Q1: her history picks it up for later revisions only.
  fx.observe(revision(5, "Q1", "Admin", format_rollback_comment("Alice", "Bob")));
  const auto v6 = fx.extract_and_update(revision(6, "Q3", "Alice"));
  REQUIRE(feature(v6, "userVandalismCount") == 3.0);
  REQUIRE(feature(v6, "userVandalismFraction") == 1.0);
  const auto v7 = fx.extract(revision(7, "Q1", "Carol"));
  REQUIRE(feature(v7, "itemVandalismCount") == 3.0);
  REQUIRE(feature(v7, "itemVandalismFraction") == Approx(3.0 / 4));
  REQUIRE_FALSE(v7.categorical[9].has_value());  // the rollback carries no action
  REQUIRE(feature(v7, "isPrivilegedUser") == 0.0);
}

TEST_CASE("out-of-order revisions are rejected") {
  FeatureExtractor fx;
  fx.observe(revision(5, "Q1", "A"));
  try {
    fx.extract_and_update(revision(5, "Q1", "A"));
    FAIL("no error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::OutOfOrder);
    REQUIRE(e.detail() == 5);
  }
}

TEST_CASE("extraction is causal and matches a per-revision recompute") {
  const auto g = wdvdb::testing::small_corpus(1500, 13, 0.08);
  const auto batch = extract_all(g.revisions);
  REQUIRE(batch.size() == g.revisions.size());
  REQUIRE(bit_equal(extract_all(g.revisions)[777], batch[777]));

  SplitMix64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const std::size_t x = rng.below(g.revisions.size());
    // Fresh state over the strict prefix, then the revision itself.
    FeatureExtractor fx;
    for (std::size_t i = 0; i < x; ++i) fx.observe(g.revisions[i]);
    REQUIRE(bit_equal(fx.extract(g.revisions[x]), batch[x]));
    const auto prefix = extract_all(std::span(g.revisions).first(x + 1));
    REQUIRE(bit_equal(prefix.back(), batch[x]));
  }

  for (const auto& v : batch) {
    for (auto name : {"userVandalismFraction", "itemVandalismFraction", "badWordRatio", "lowerCaseWordRatio"}) {
      const double x = v.get(name);
      if (!is_missing(x)) {
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
      }
    }
    REQUIRE(v.get("logItemFrequency") >= 0.0);
    REQUIRE(v.get("logCumItemUniqueUsers") >= 0.0);
  }
}

TEST_CASE("encoder one-hot, frequency and freezing") {
  FeatureVector en, de, city;
  en.categorical[6] = "en";
  de.categorical[6] = "de";
  en.categorical[4] = "Berlin";
  de.categorical[4] = "Paris";
  en.tags = {"mobile edit"};

  Encoder enc;
  REQUIRE_THROWS_AS(enc.encode(en), Error);
  try {
    (void)enc.encode(en);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NotFrozenInTest);
  }
  enc.observe(en);
  enc.observe(de);
  enc.observe(en);
  enc.freeze();

  const auto& lang = enc.fields()[6];
  REQUIRE(lang.mode() == CategoricalMode::OneHot);
  REQUIRE(lang.id_of("en") == 0);
  REQUIRE(lang.id_of("de") == 1);
  const auto& cols = enc.column_names();
  const auto col = [&](const std::string& name) {
    const auto it = std::find(cols.begin(), cols.end(), name);
    REQUIRE(it != cols.end());
    return static_cast<std::size_t>(it - cols.begin());
  };
  const auto row = enc.encode(en);
  REQUIRE(row[col("revisionLanguage=en")] == 1.0);
  REQUIRE(row[col("revisionLanguage=de")] == 0.0);
  REQUIRE(row[col("userCity.freq")] == Approx(2.0 / 3));
  REQUIRE(row[col("revisionTags=mobile edit")] == 1.0);
  REQUIRE(column_base("revisionLanguage=en") == "revisionLanguage");
  REQUIRE(column_base("userCity.freq") == "userCity");

  city.categorical[4] = "Nowhere";
  city.categorical[6] = "fr";
  const auto unseen = enc.encode(city);
  REQUIRE(unseen[col("userCity.freq")] == 0.0);
  REQUIRE(unseen[col("revisionLanguage=en")] == 0.0);
  REQUIRE(unseen[col("revisionLanguage=de")] == 0.0);
  REQUIRE(is_missing(enc.encode(FeatureVector{})[col("userCity.freq")]));
  REQUIRE_THROWS_AS(enc.observe(en), Error);

  ByteWriter w;
  enc.write(w);
  const std::string bytes = w.take();
  ByteReader r(bytes);
  const Encoder back = Encoder::read(r);
  REQUIRE(back == enc);
  REQUIRE(back.column_names() == enc.column_names());
  REQUIRE(back.fields()[6].value_of(1) == "de");
}

TEST_CASE("categoricals with many values fall back to frequency") {
  Encoder enc;
  for (int i = 0; i < 70; ++i) {
    FeatureVector v;
    v.categorical[7] = "action" + std::to_string(i);
    enc.observe(v);
  }
  enc.freeze();
  REQUIRE(enc.fields()[7].mode() == CategoricalMode::Frequency);
  REQUIRE(enc.fields()[6].mode() == CategoricalMode::OneHot);
}

TEST_CASE("feature matrix export") {
  FeatureExtractor fx;
  std::vector<FeatureVector> rows;
  rows.push_back(fx.extract_and_update(revision(1, "Q1", "Alice")));
  RevisionRecord tagged = revision(2, "Q1", "Bob");
  tagged.tags = {"a", "b"};
  rows.push_back(fx.extract_and_update(tagged));
  std::ostringstream out;
  write_feature_matrix(out, rows);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  const auto names = text::split(header, '\t');
  REQUIRE(names.size() == 1 + kNumericFeatureCount + kCategoricalFeatureCount + 1);
  REQUIRE(names.front() == "revision_id");
  REQUIRE(names.back() == "revisionTags");
  std::vector<std::vector<std::string>> body;
  while (std::getline(in, line)) {
    const auto cells = text::split(line, '\t');
    body.emplace_back(cells.begin(), cells.end());
  }
  REQUIRE(body.size() == 2);
  for (const auto& cells : body) REQUIRE(cells.size() == names.size());
  const auto at = [&](std::size_t row, std::string_view name) {
    const auto it = std::find(names.begin(), names.end(), name);
    return body[row][static_cast<std::size_t>(it - names.begin())];
  };
  REQUIRE(at(0, "userVandalismFraction").empty());
  REQUIRE(at(1, "userFrequency") == "0");
  REQUIRE(at(1, "itemFrequency") == "1");
  REQUIRE(at(1, "revisionTags") == "a,b");
  REQUIRE(at(0, "revisionAction") == "wbsetlabel");
}
