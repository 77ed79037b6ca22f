// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace wdvdb;
using wdvdb::testing::code_of;
using wdvdb::testing::revision;

namespace {

std::string corpus_bytes(const std::vector<RevisionRecord>& revisions) {
  std::ostringstream out;
  write_corpus(out, revisions);
  return out.str();
}

}  // namespace

TEST_CASE("corpus rows round-trip through TSV") {
  const auto g = wdvdb::testing::small_corpus(3000);
  const std::string bytes = corpus_bytes(g.revisions);
  std::istringstream in(bytes);
  const auto back = read_corpus(in);
  REQUIRE(back == g.revisions);

  RevisionRecord odd = revision(5, "Q9", "10.0.0.7", "free text\nwith newline \\ and tab\t");
  odd.geo = GeoInfo{"EU", "DE", "Berlin", "", "Berlin", "Europe/Berlin"};
  odd.tags = {"mobile edit", "possible vandalism"};
  odd.content_type = ContentType::Body;
  odd.property_id = "P31";
  odd.value_item = "Q5";
  odd.bytes_changed = -17;
  REQUIRE(parse_row(format_row(odd), 1) == odd);
}

TEST_CASE("malformed rows are rejected with their line number") {
  const std::string good = format_row(revision(1, "Q1", "Alice"));
  try {
    parse_row("1\t2\t3", 7);
    FAIL("no error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::MalformedRow);
    REQUIRE(e.detail() == 7);
  }
  auto cols = good;
  REQUIRE(code_of([&] { parse_row(std::string("x") + good, 1); }) == ErrorCode::MalformedRow);

  RevisionRecord head_with_property = revision(2, "Q1", "Alice");
  head_with_property.property_id = "P31";
  REQUIRE(code_of([&] { parse_row(format_row(head_with_property), 1); }) == ErrorCode::MalformedRow);

  RevisionRecord bad_item = revision(3, "item", "Alice");
  REQUIRE(code_of([&] { parse_row(format_row(bad_item), 1); }) == ErrorCode::MalformedRow);
}

TEST_CASE("corpus ids must increase") {
  const std::string a = format_row(revision(10, "Q1", "A")) + "\n";
  const std::string b = format_row(revision(9, "Q1", "A")) + "\n";
  std::istringstream dup(a + a), back(a + b);
  REQUIRE(code_of([&] { read_corpus(dup); }) == ErrorCode::DuplicateId);
  REQUIRE(code_of([&] { read_corpus(back); }) == ErrorCode::NonMonotoneId);
}

TEST_CASE("ground truth round-trips and is validated") {
  const GroundTruth t = {{1, false, std::nullopt}, {2, true, 5}, {3, false, std::nullopt}};
  std::ostringstream out;
  write_truth(out, t);
  std::istringstream in(out.str());
  REQUIRE(read_truth(in) == t);

  std::istringstream vandal_without_revert("4\t1\t\n");
  REQUIRE(code_of([&] { read_truth(vandal_without_revert); }) == ErrorCode::MalformedRow);
  std::istringstream revert_before("4\t1\t3\n");
  REQUIRE(code_of([&] { read_truth(revert_before); }) == ErrorCode::MalformedRow);
}

TEST_CASE("rollback labeling marks exactly the reverted revisions") {
  const std::vector<RevisionRecord> revs = {revision(1, "Q1", "A"), revision(2, "Q1", "V"), revision(3, "Q1", "V"),
                                            revision(4, "Q1", "Admin")};
  const std::vector<RollbackEvent> rb = {{4, {2, 3}}};
  const auto truth = label_from_rollbacks(revs, rb);
  REQUIRE(truth.size() == 4);
  REQUIRE_FALSE(truth[0].is_vandalism);
  REQUIRE(truth[1].is_vandalism);
  REQUIRE(truth[1].reverting_revision_id == 4);
  REQUIRE(truth[2].is_vandalism);
  REQUIRE_FALSE(truth[3].is_vandalism);
  REQUIRE(rollback_events(truth) == rb);

  const std::vector<RollbackEvent> unknown = {{4, {99}}};
  REQUIRE(code_of([&] { label_from_rollbacks(revs, unknown); }) == ErrorCode::UnknownRevision);
  const std::vector<RollbackEvent> backwards = {{2, {3}}};
  REQUIRE(code_of([&] { label_from_rollbacks(revs, backwards); }) == ErrorCode::InvalidRollback);
}

TEST_CASE("generator is deterministic in its seed") {
  const auto a = wdvdb::testing::small_corpus(4000, 42);
  const auto b = wdvdb::testing::small_corpus(4000, 42);
  const auto c = wdvdb::testing::small_corpus(4000, 43);
  REQUIRE(corpus_bytes(a.revisions) == corpus_bytes(b.revisions));
  REQUIRE(a.truth == b.truth);
  REQUIRE(corpus_bytes(a.revisions) != corpus_bytes(c.revisions));
}

TEST_CASE("generated corpora satisfy the corpus invariants") {
  const auto g = wdvdb::testing::small_corpus(20000, 5, 0.03);
  SynthConfig defaults;
  REQUIRE(g.revisions.size() == 20000);
  for (std::size_t i = 1; i < g.revisions.size(); ++i) {
    REQUIRE(g.revisions[i].revision_id > g.revisions[i - 1].revision_id);
    REQUIRE(g.revisions[i].timestamp >= g.revisions[i - 1].timestamp);
  }
  REQUIRE(g.revisions.front().timestamp >= defaults.start);
  REQUIRE(g.revisions.back().timestamp < defaults.end);

  std::map<RevisionId, const RevisionRecord*> by_id;
  for (const auto& r : g.revisions) by_id[r.revision_id] = &r;
  const auto& lex = Lexicons::defaults();
  for (const auto& ev : g.rollbacks) {
    REQUIRE(by_id.contains(ev.reverting_id));
    const RevisionRecord& rb = *by_id[ev.reverting_id];
    REQUIRE(is_privileged(lex, rb.user_id));
    REQUIRE_FALSE(ev.reverted_ids.empty());
    const RevisionRecord& first = *by_id.at(ev.reverted_ids.front());
    REQUIRE(rollback_target(rb.comment) == first.user_id);
    for (RevisionId t : ev.reverted_ids) {
      REQUIRE(t < ev.reverting_id);
      REQUIRE(by_id.at(t)->item_id == rb.item_id);
      REQUIRE(by_id.at(t)->user_id == first.user_id);
    }
  }
  REQUIRE(g.truth == label_from_rollbacks(g.revisions, g.rollbacks));
  REQUIRE(rollback_events(g.truth) == g.rollbacks);

  std::int64_t vandal = 0;
  for (const auto& e : g.truth) vandal += e.is_vandalism;
  const double rate = static_cast<double>(vandal) / static_cast<double>(g.truth.size());
  REQUIRE(rate > 0.02);
  REQUIRE(rate < 0.04);

  for (const auto& r : g.revisions) {
    if (r.property_id) REQUIRE(r.content_type == ContentType::Body);
    REQUIRE(is_anonymous_user(r.user_id) == r.geo.has_value());
  }
}

TEST_CASE("generator rejects invalid configurations") {
  SynthConfig c;
  c.vandalism_rate = 0.7;
  REQUIRE(code_of([&] { generate_corpus(c); }) == ErrorCode::InvalidConfig);
  c = SynthConfig{};
  c.n_revisions = 0;
  REQUIRE(code_of([&] { generate_corpus(c); }) == ErrorCode::InvalidConfig);
  c = SynthConfig{};
  c.badword_inject_prob = 1.5;
  REQUIRE(code_of([&] { generate_corpus(c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("burst edits are one reputable user's rolled-back statements") {
  SynthConfig c;
  c.n_revisions = 6000;
  c.n_users = 200;
  c.n_items = 400;
  c.burst_size = 40;
  const auto g = generate_corpus(c);
  std::map<std::string, std::int64_t> tagged;
  for (const auto& r : g.revisions)
    if (std::find(r.tags.begin(), r.tags.end(), "QuickStatements") != r.tags.end() && r.property_id == "P569")
      ++tagged[r.user_id];
  REQUIRE_FALSE(tagged.empty());
  const auto top = std::max_element(tagged.begin(), tagged.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; });
  REQUIRE(top->second >= 40);
}

TEST_CASE("anonymous users are IP addresses") {
  REQUIRE(is_anonymous_user("192.168.0.1"));
  REQUIRE(is_anonymous_user("2001:db8::1"));
  REQUIRE_FALSE(is_anonymous_user("Alice"));
  REQUIRE_FALSE(is_anonymous_user("999.1.1.1"));
}

TEST_CASE("sessions are same-user runs per item") {
  // Q1: A A B A ; Q2 interleaved: A A
  const std::vector<RevisionRecord> revs = {revision(1, "Q1", "A"), revision(2, "Q2", "A"), revision(3, "Q1", "A"),
                                            revision(4, "Q1", "B"), revision(5, "Q2", "A"), revision(6, "Q1", "A")};
  const auto s = assign_sessions(revs);
  REQUIRE(s.session_count() == 4);
  REQUIRE(s.find(1)->session_id == s.find(3)->session_id);
  REQUIRE(s.find(3)->position == 2);
  REQUIRE(s.find(2)->session_id == s.find(5)->session_id);
  REQUIRE(s.find(5)->position == 2);
  REQUIRE(s.find(4)->position == 1);
  REQUIRE(s.find(6)->position == 1);
  REQUIRE(s.find(6)->session_id != s.find(1)->session_id);
  REQUIRE(s.find(99) == nullptr);
}

TEST_CASE("standard manifest boundaries") {
  const auto m = DatasetManifest::standard();
  REQUIRE(m.splits().size() == 3);
  const auto at = [&](const char* iso) {
    const Timestamp t = *time::parse_iso8601(iso);
    for (const auto& s : m.splits())
      if (s.interval.contains(t)) return s.name;
    return std::string("none");
  };
  REQUIRE(at("2012-10-01T00:00:00Z") == "TRAINING");
  REQUIRE(at("2016-02-29T23:59:59Z") == "TRAINING");
  REQUIRE(at("2016-03-01T00:00:00Z") == "VALIDATION");
  REQUIRE(at("2016-04-30T23:59:59Z") == "VALIDATION");
  REQUIRE(at("2016-05-01T00:00:00Z") == "TEST");
  REQUIRE(at("2016-06-30T23:59:59Z") == "TEST");
  REQUIRE(at("2016-07-01T00:00:00Z") == "none");
  REQUIRE(at("2012-09-30T23:59:59Z") == "none");
}

TEST_CASE("manifests round-trip and reject overlaps") {
  const auto m = DatasetManifest::standard();
  const auto back = parse_manifest(nlohmann::json::parse(manifest_to_json(m).dump()));
  REQUIRE(back.splits() == m.splits());
  REQUIRE(code_of([] {
            DatasetManifest({{"A", {0, 100}}, {"B", {50, 200}}});
          }) == ErrorCode::OverlappingIntervals);
  REQUIRE(code_of([] { DatasetManifest({{"A", {10, 10}}}); }) == ErrorCode::InvalidManifest);
  REQUIRE(code_of([] { parse_manifest(nlohmann::json::parse(R"({"splits":[{"name":"A"}]})")); }) ==
          ErrorCode::InvalidManifest);
}

TEST_CASE("split_corpus places each row at most once") {
  const auto g = wdvdb::testing::small_corpus(5000);
  const auto m = DatasetManifest::standard();
  const auto split = split_corpus(g.revisions, m);
  std::size_t placed = 0;
  for (const auto& p : split.parts) {
    placed += p.rows.size();
    for (std::size_t i : p.rows) REQUIRE(p.interval.contains(g.revisions[i].timestamp));
  }
  REQUIRE(placed + split.dropped == g.revisions.size());
  REQUIRE(split.get("TEST").rows.size() > 0);
}

TEST_CASE("statistics on a hand-built corpus") {
  // Items: Q1 (HEAD edits), Q2 (BODY edits). V vandalizes both.
  auto body = [](RevisionRecord r) {
    r.content_type = ContentType::Body;
    return r;
  };
  const std::vector<RevisionRecord> revs = {revision(1, "Q1", "A"), revision(2, "Q1", "V"), revision(3, "Q1", "V"),
                                            revision(4, "Q1", "Admin"), body(revision(5, "Q2", "V")),
                                            body(revision(6, "Q2", "A"))};
  const GroundTruth truth = {{1, false, {}}, {2, true, 4}, {3, true, 4}, {4, false, {}}, {5, true, 6}, {6, false, {}}};
  const auto s = compute_stats(revs, truth);
  REQUIRE(s.revisions.all == StatCell{6, 3, 3});
  REQUIRE(s.revisions.head == StatCell{4, 2, 2});
  REQUIRE(s.revisions.body == StatCell{2, 1, 1});
  // Sessions: {1}, {2,3}, {4}, {5}, {6}
  REQUIRE(s.sessions.all == StatCell{5, 2, 3});
  // Both items hold vandalism and regular revisions.
  REQUIRE(s.items.all == StatCell{2, 2, 2});
  // Users A, V, Admin.
  REQUIRE(s.users.all == StatCell{3, 1, 2});
  REQUIRE(s.users.body == StatCell{2, 1, 1});

  const GroundTruth partial = {{1, false, {}}};
  REQUIRE(code_of([&] { compute_stats(revs, partial); }) == ErrorCode::MissingLabel);
}

TEST_CASE("statistics obey overlap semantics on generated data") {
  const auto g = wdvdb::testing::small_corpus(8000);
  const auto s = compute_stats(g.revisions, g.truth);
  REQUIRE(s.revisions.all.total == 8000);
  REQUIRE(s.revisions.all.vandalism + s.revisions.all.regular == s.revisions.all.total);
  REQUIRE(s.revisions.head.total + s.revisions.body.total == s.revisions.all.total);
  for (const StatRow* row : {&s.sessions, &s.items, &s.users}) {
    REQUIRE(row->all.vandalism + row->all.regular >= row->all.total);
    REQUIRE(row->all.vandalism <= row->all.total);
    REQUIRE(row->all.regular <= row->all.total);
  }
}
