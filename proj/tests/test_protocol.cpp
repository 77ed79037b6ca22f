// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "leak_fixture.hpp"
#include "support.hpp"

using namespace wdvdb;
using namespace std::chrono_literals;
using wdvdb::testing::code_of;
using wdvdb::testing::revision;

namespace {

std::vector<RevisionRecord> tiny_stream(int n) {
  std::vector<RevisionRecord> out;
  for (int i = 1; i <= n; ++i) out.push_back(revision(i * 10, "Q" + std::to_string(i % 3 + 1), "U" + std::to_string(i % 2)));
  return out;
}

struct ServerOutcome {
  StreamTrace trace;
  std::optional<ErrorCode> error;
  std::int64_t detail = 0;
};

// Runs the server in a thread and hands the raw client connection to `client`.
ServerOutcome with_server(std::span<const RevisionRecord> revs, ServerConfig cfg,
                          const std::function<void(net::Connection&)>& client) {
  net::Listener listener(net::Address{"127.0.0.1", 0});
  ReplayServer server(revs, cfg);
  ServerOutcome out;
  std::thread t([&] {
    try {
      net::Connection conn = listener.accept(5000ms);
      server.run(conn);
    } catch (const Error& e) {
      out.error = e.code();
      out.detail = e.detail();
    }
  });
  {
    net::Connection conn = net::connect(listener.address());
    try {
      client(conn);
    } catch (...) {
    }
  }
  t.join();
  out.trace = server.trace();
  return out;
}

// Reads WELCOME and every R frame the server has in flight.
std::vector<RevisionId> handshake(net::Connection& c, std::size_t expect) {
  c.write(wire::hello("raw"));
  c.flush();
  std::string line;
  REQUIRE(c.read_line(line, 2000ms) == net::Connection::ReadStatus::Line);
  REQUIRE(line.rfind("WELCOME\t", 0) == 0);
  std::vector<RevisionId> ids;
  while (ids.size() < expect) {
    REQUIRE(c.read_line(line, 2000ms) == net::Connection::ReadStatus::Line);
    ids.push_back(std::get<wire::Revision>(wire::parse_server_frame(line)).record.revision_id);
  }
  return ids;
}

std::vector<TraceEventType> kinds(const StreamTrace& t) {
  std::vector<TraceEventType> out;
  for (const auto& e : t.events) out.push_back(e.type);
  return out;
}

ClientOptions lazy(std::size_t total) {
  ClientOptions o;
  o.policy = ReplyPolicy::Lazy;
  o.expected_total = total;
  return o;
}

}  // namespace

TEST_CASE("wire frames") {
  REQUIRE(wire::hello("me") == "HELLO\tme\n");
  REQUIRE(wire::welcome(16) == "WELCOME\t16\n");
  REQUIRE(wire::score(7, 0.25) == "S\t7\t0.25\n");
  REQUIRE(wire::end() == "E\n");

  const auto s = std::get<wire::Score>(wire::parse_client_frame("S\t7\t0.25", 1));
  REQUIRE(s.revision_id == 7);
  REQUIRE(s.score == 0.25);
  REQUIRE(std::get<wire::Hello>(wire::parse_client_frame("HELLO\ta\\tb")).client_name == "a\tb");
  try {
    wire::parse_client_frame("S\t7\tzero", 4);
    FAIL("no error");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::MalformedScore);
    REQUIRE(e.detail() == 4);
  }
  REQUIRE(code_of([] { wire::parse_client_frame("S\t7\tnan"); }) == ErrorCode::MalformedScore);
  REQUIRE(code_of([] { wire::parse_client_frame("SCORE\t7\t0.5"); }) == ErrorCode::ProtocolViolation);
  REQUIRE(code_of([] { wire::parse_client_frame(""); }) == ErrorCode::ProtocolViolation);

  RevisionRecord odd = revision(5, "Q9", "10.0.0.1", "tab\there\nnewline \\ slash");
  odd.geo = GeoInfo{"EU", "DE", "", "", "Berlin", ""};
  odd.tags = {"a b", "c"};
  std::string frame = wire::revision(odd);
  REQUIRE(frame.back() == '\n');
  frame.pop_back();
  REQUIRE(std::count(frame.begin(), frame.end(), '\t') == 2);
  REQUIRE(std::get<wire::Revision>(wire::parse_server_frame(frame)).record == odd);
  REQUIRE(std::holds_alternative<wire::End>(wire::parse_server_frame("E")));
  REQUIRE(code_of([] { wire::parse_server_frame("WELCOME\t0"); }) == ErrorCode::ProtocolViolation);
  REQUIRE(code_of([&] { wire::parse_server_frame("R\t6\t" + frame.substr(frame.rfind('\t') + 1)); }) ==
          ErrorCode::ProtocolViolation);
}

TEST_CASE("addresses") {
  const auto a = net::parse_address("localhost:8080");
  REQUIRE(a.host == "localhost");
  REQUIRE(a.port == 8080);
  REQUIRE(net::parse_address("9000").host == "127.0.0.1");
  REQUIRE(code_of([] { net::parse_address("host:99999"); }) == ErrorCode::Usage);
}

TEST_CASE("replay window bookkeeping") {
  const auto revs = tiny_stream(5);
  ReplayWindow w(revs, 2);
  REQUIRE(w.send().revision_id == 10);
  REQUIRE(w.send().revision_id == 20);
  REQUIRE_FALSE(w.can_send());
  REQUIRE(w.oldest_open() == 10);
  REQUIRE(code_of([&] { w.send(); }) == ErrorCode::ProtocolViolation);
  REQUIRE(code_of([&] { w.score(20, 1.7); }) == ErrorCode::ScoreOutOfRange);
  REQUIRE(code_of([&] { w.score(30, 0.5); }) == ErrorCode::UnknownRevisionScored);
  w.score(20, 0.5);
  REQUIRE(code_of([&] { w.score(20, 0.5); }) == ErrorCode::UnknownRevisionScored);
  REQUIRE(w.can_send());
  REQUIRE(code_of([&] { w.end(); }) == ErrorCode::ProtocolViolation);
  REQUIRE(code_of([&] { ReplayWindow(revs, 0); }) == ErrorCode::InvalidConfig);
  auto reversed = revs;
  std::reverse(reversed.begin(), reversed.end());
  REQUIRE(code_of([&] { ReplayWindow(reversed, 2); }) == ErrorCode::NonMonotoneId);
}

TEST_CASE("five revisions through a window of two") {
  const auto revs = tiny_stream(5);
  FunctionDetector d([](const RevisionRecord&) { return 0.5; });
  const auto res = self_play(revs, d, ServerConfig{2, 5000ms});
  using T = TraceEventType;
  REQUIRE(kinds(res.trace) == std::vector<T>{T::Sent, T::Sent, T::Scored, T::Sent, T::Scored, T::Sent,
                                             T::Scored, T::Sent, T::Scored, T::Scored, T::End});
  REQUIRE(res.trace.events[0].revision_id == 10);
  REQUIRE(res.trace.events[1].revision_id == 20);
  REQUIRE(res.trace.events[2].revision_id == 10);
  REQUIRE(res.trace.events[3].revision_id == 30);
  REQUIRE(res.trace.max_outstanding() == 2);
  validate_trace(res.trace);
}

TEST_CASE("a stream shorter than the window goes out at once") {
  const auto revs = tiny_stream(10);
  FunctionDetector d([](const RevisionRecord&) { return 0.5; });
  const auto res = self_play(revs, d, ServerConfig{16, 5000ms});
  for (int i = 0; i < 10; ++i) REQUIRE(res.trace.events[static_cast<std::size_t>(i)].type == TraceEventType::Sent);
  REQUIRE(res.client.k == 16);
}

TEST_CASE("constant detector over 100 revisions") {
  const auto revs = tiny_stream(100);
  FunctionDetector d([](const RevisionRecord&) { return 0.5; });
  const auto res = self_play(revs, d);
  REQUIRE(res.client.scores.size() == 100);
  for (double s : res.client.scores.scores) REQUIRE(s == 0.5);
  REQUIRE(res.trace.ended());
}

TEST_CASE("window safety under random client delays") {
  const auto g = wdvdb::testing::small_corpus(2000, 3);
  SplitMix64 rng(1);
  for (std::int64_t k : {1, 2, 5, 16, 64}) {
    for (int run = 0; run < 3; ++run) {
      const std::size_t n = 1 + rng.below(g.revisions.size());
      const std::span<const RevisionRecord> revs(g.revisions.data(), n);
      FunctionDetector d([&](const RevisionRecord& r) { return static_cast<double>(r.revision_id % 100) / 100.0; });
      ClientOptions o;
      o.policy = run == 0 ? ReplyPolicy::Lazy : ReplyPolicy::RandomHold;
      o.seed = rng.next();
      o.idle = 5ms;
      const auto res = self_play(revs, d, ServerConfig{k, 5000ms}, o);
      validate_trace(res.trace);
      std::int64_t open = 0;
      for (const auto& e : res.trace.events) {
        open += e.type == TraceEventType::Sent ? 1 : e.type == TraceEventType::Scored ? -1 : 0;
        REQUIRE(open <= k);
      }
      REQUIRE(res.client.scores.size() == n);
      REQUIRE(res.trace.events.size() == 2 * n + 1);
    }
  }
}

TEST_CASE("pipelined and reordered clients return the serial score table") {
  const auto g = wdvdb::testing::small_corpus(3000, 9);
  // Stateful: depends on how often the user was seen before.
  const auto make = [] {
    auto seen = std::make_shared<std::unordered_map<std::string, int>>();
    return FunctionDetector([seen](const RevisionRecord& r) { return 1.0 / (1.0 + (*seen)[r.user_id]++); });
  };
  auto serial_detector = make();
  const auto serial = self_play(g.revisions, serial_detector).client.scores;
  for (bool pipelined : {false, true}) {
    for (auto policy : {ReplyPolicy::Immediate, ReplyPolicy::RandomHold, ReplyPolicy::Lazy}) {
      auto d = make();
      ClientOptions o;
      o.pipelined = pipelined;
      o.policy = policy;
      o.idle = 5ms;
      o.seed = 4;
      REQUIRE(self_play(g.revisions, d, ServerConfig{8, 5000ms}, o).client.scores == serial);
    }
  }
}

TEST_CASE("server rejects bad client frames") {
  const auto revs = tiny_stream(5);
  const ServerConfig cfg{2, 3000ms};

  auto out = with_server(revs, cfg, [](net::Connection& c) {
    handshake(c, 2);
    c.write("S\t10\t1.7\n");
    c.flush();
    std::string line;
    c.read_line(line, 2000ms);
  });
  REQUIRE(out.error == ErrorCode::ScoreOutOfRange);
  REQUIRE(out.detail == 10);

  out = with_server(revs, cfg, [](net::Connection& c) {
    handshake(c, 2);
    c.write("S\t10\tabc\n");
    c.flush();
    std::string line;
    c.read_line(line, 2000ms);
  });
  REQUIRE(out.error == ErrorCode::MalformedScore);
  REQUIRE(out.detail == 2);

  out = with_server(revs, cfg, [](net::Connection& c) {
    handshake(c, 2);
    c.write("S\t30\t0.5\n");
    c.flush();
    std::string line;
    c.read_line(line, 2000ms);
  });
  REQUIRE(out.error == ErrorCode::UnknownRevisionScored);
  REQUIRE(out.detail == 30);

  out = with_server(revs, cfg, [](net::Connection& c) {
    handshake(c, 2);
    c.write("HELLO\tagain\n");
    c.flush();
    std::string line;
    c.read_line(line, 2000ms);
  });
  REQUIRE(out.error == ErrorCode::ProtocolViolation);

  out = with_server(revs, cfg, [](net::Connection& c) {
    c.write("S\t10\t0.5\n");
    c.flush();
    std::string line;
    c.read_line(line, 2000ms);
  });
  REQUIRE(out.error == ErrorCode::ProtocolViolation);

  out = with_server(revs, cfg, [](net::Connection& c) {
    handshake(c, 2);
    c.write("S\t20\t0.5\n");
    c.flush();
  });
  REQUIRE(out.error == ErrorCode::ClientDisconnect);
  REQUIRE(out.detail == 4);  // two SENT, one SCORED, one more SENT
  REQUIRE(out.trace.events.size() == 4);
  REQUIRE_FALSE(out.trace.ended());
  validate_trace(out.trace, false);
}

TEST_CASE("silent clients time out on the oldest open revision") {
  const auto revs = tiny_stream(5);
  const auto out = with_server(revs, ServerConfig{2, 150ms}, [](net::Connection& c) {
    handshake(c, 2);
    c.write("S\t20\t0.5\n");
    c.flush();
    std::string line;
    // R 30 arrives first; the loop ends when the server gives up.
    while (c.read_line(line, 2000ms) == net::Connection::ReadStatus::Line) {
    }
  });
  REQUIRE(out.error == ErrorCode::Timeout);
  REQUIRE(out.detail == 10);
}

TEST_CASE("client failures") {
  const auto revs = tiny_stream(6);
  FunctionDetector throws_on_third([](const RevisionRecord& r) -> double {
    if (r.revision_id == 30) throw std::runtime_error("detector broke");
    return 0.1;
  });
  const auto out = with_server(revs, ServerConfig{2, 3000ms}, [&](net::Connection& c) {
    REQUIRE_THROWS_AS(run_client(throws_on_third, c), std::runtime_error);
    REQUIRE_FALSE(c.open());
  });
  REQUIRE(out.error == ErrorCode::ClientDisconnect);
  REQUIRE_FALSE(out.trace.ended());

  FunctionDetector too_high([](const RevisionRecord&) { return 1.7; });
  REQUIRE(code_of([&] { self_play(revs, too_high); }) == ErrorCode::ScoreOutOfRange);

  std::optional<net::Address> closed;
  {
    net::Listener l(net::Address{"127.0.0.1", 0});
    closed = l.address();
  }
  FunctionDetector half([](const RevisionRecord&) { return 0.5; });
  REQUIRE(code_of([&] { run_client(half, *closed); }) == ErrorCode::ConnectionRefused);

  // A server that does not speak the protocol.
  net::Listener rogue(net::Address{"127.0.0.1", 0});
  std::thread t([&] {
    net::Connection c = rogue.accept(3000ms);
    std::string line;
    c.read_line(line, 2000ms);
    c.write("HI THERE\n");
    c.flush();
    c.read_line(line, 2000ms);
  });
  REQUIRE(code_of([&] { run_client(half, rogue.address()); }) == ErrorCode::ProtocolViolation);
  t.join();
}

TEST_CASE("traces round-trip and are validated") {
  const auto revs = tiny_stream(20);
  FunctionDetector d([](const RevisionRecord& r) { return 1.0 / static_cast<double>(r.revision_id); });
  const auto res = self_play(revs, d, ServerConfig{4, 5000ms});
  std::ostringstream out;
  write_trace(out, res.trace);
  std::istringstream in(out.str());
  REQUIRE(read_trace(in) == res.trace);

  StreamTrace bad;
  bad.sent(2);
  bad.sent(1);
  REQUIRE(code_of([&] { validate_trace(bad, false); }) == ErrorCode::MalformedTrace);
  StreamTrace early;
  early.scored(1, 0.5);
  REQUIRE(code_of([&] { validate_trace(early, false); }) == ErrorCode::MalformedTrace);
  StreamTrace twice;
  twice.sent(1);
  twice.scored(1, 0.5);
  twice.scored(1, 0.5);
  REQUIRE(code_of([&] { validate_trace(twice, false); }) == ErrorCode::MalformedTrace);
  StreamTrace open_end;
  open_end.sent(1);
  REQUIRE(code_of([&] { validate_trace(open_end); }) == ErrorCode::MalformedTrace);
  std::istringstream junk("SENT\tx\t1\n");
  REQUIRE(code_of([&] { read_trace(junk); }) == ErrorCode::MalformedTrace);
}

TEST_CASE("leak audit on hand-built rollbacks") {
  FunctionDetector half([](const RevisionRecord&) { return 0.5; });
  const auto audit = [&](const testing::LeakCase& c, std::int64_t k) {
    const auto fx = testing::build_leak_fixture(std::span(&c, 1));
    const auto res = self_play(fx.revisions, half, ServerConfig{k, 5000ms}, lazy(fx.revisions.size()));
    return audit_leak(res.trace, fx.revisions, fx.rollbacks, fx.truth.size());
  };
  // Rollback three frames after the vandal edit.
  auto r = audit({1, false, 3}, 16);
  REQUIRE(r.leaked_vandalism == 1);
  REQUIRE(r.leaked_regular == 0);
  REQUIRE(r.leaked_fraction == 1.0 / 120);
  // Twenty frames later the vandal edit is necessarily scored already.
  r = audit({1, false, 20}, 16);
  REQUIRE(r.leaked_vandalism == 0);
  REQUIRE(r.leaked_regular == 0);
  // The earlier regular edit on the item is revealed too.
  r = audit({2, true, 4}, 16);
  REQUIRE(r.leaked_vandalism == 2);
  REQUIRE(r.leaked_regular == 1);
  // With k = 1 nothing is ever open next to the rollback.
  r = audit({2, true, 2}, 1);
  REQUIRE(r.leaked_vandalism + r.leaked_regular == 0);
  // An immediate client scores everything before the next frame is needed.
  const auto fx = testing::build_leak_fixture(std::vector<testing::LeakCase>{{1, true, 2}});
  StreamTrace serial;
  for (const auto& rev : fx.revisions) {
    serial.sent(rev.revision_id);
    serial.scored(rev.revision_id, 0.5);
  }
  serial.end();
  REQUIRE(audit_leak(serial, fx.revisions, fx.rollbacks, fx.truth.size()) == LeakReport{});

  StreamTrace stranger;
  stranger.sent(123456789);
  stranger.scored(123456789, 0.5);
  stranger.end();
  const std::vector<RollbackEvent> rb = {{123456789, {1}}};
  REQUIRE(code_of([&] { audit_leak(stranger, fx.revisions, rb, 1); }) == ErrorCode::MalformedTrace);
}

TEST_CASE("leak counts grow with the window") {
  const auto g = wdvdb::testing::small_corpus(4000, 27, 0.06);
  FunctionDetector half([](const RevisionRecord&) { return 0.5; });
  std::int64_t prev = -1;
  for (std::int64_t k : {1, 2, 4, 8, 16, 32, 64}) {
    const auto res = self_play(g.revisions, half, ServerConfig{k, 5000ms}, lazy(g.revisions.size()));
    const auto r = audit_leak(res.trace, g.revisions, g.rollbacks, g.truth.size());
    const std::int64_t total = r.leaked_regular + r.leaked_vandalism;
    INFO("k=" << k << " leaked=" << total);
    if (k == 1) REQUIRE(total == 0);
    REQUIRE(total >= prev);
    prev = total;
  }
  REQUIRE(prev > 0);
}
