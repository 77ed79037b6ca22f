// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/evaluation/scores.hpp"
#include "wdvdb/protocol/socket.hpp"
#include "wdvdb/protocol/wire.hpp"
#include "wdvdb/util/random.hpp"

namespace wdvdb {

/// Stateful scorer. score() is called once per revision, in stream order.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual double score(const RevisionRecord& r) = 0;
};

class FunctionDetector final : public Detector {
 public:
  explicit FunctionDetector(std::function<double(const RevisionRecord&)> f) : f_(std::move(f)) {}
  double score(const RevisionRecord& r) override { return f_(r); }

 private:
  std::function<double(const RevisionRecord&)> f_;
};

/// When computed scores are returned to the server.
enum class ReplyPolicy {
  Immediate,   // as soon as computed
  RandomHold,  // hold a random number (< k) back, release in random order
  Lazy,        // only when the window is full, oldest first
};

struct ClientOptions {
  std::string name = "wdvdb";
  ReplyPolicy policy = ReplyPolicy::Immediate;
  std::uint64_t seed = 0;
  // Receive frames on a separate thread while scoring.
  bool pipelined = false;
  // Known stream length; lets holding policies release the tail at once
  // instead of waiting `idle` for frames that will not come.
  std::optional<std::size_t> expected_total;
  std::chrono::milliseconds idle{100};
  std::chrono::milliseconds timeout{60'000};
};

struct ClientResult {
  ScoreTable scores;  // in receive order
  std::int64_t k = 0;
};

namespace detail {

// Yields parsed server frames, either straight off the socket or via a
// reader thread.
class FrameSource {
 public:
  using Millis = std::chrono::milliseconds;

  FrameSource(net::Connection& conn, bool threaded) : conn_(conn), threaded_(threaded) {
    if (threaded_) reader_ = std::thread([this] { read_loop(); });
  }
  FrameSource(const FrameSource&) = delete;
  FrameSource& operator=(const FrameSource&) = delete;
  ~FrameSource() { stop(); }

  void stop() noexcept {
    if (!reader_.joinable()) return;
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    conn_.shutdown();
    reader_.join();
  }

  /// Next frame, or nullopt when none arrives within `wait`.
  std::optional<wire::ServerFrame> next(Millis wait) {
    if (!threaded_) {
      std::string line;
      switch (conn_.read_line(line, wait)) {
        case net::Connection::ReadStatus::TimedOut: return std::nullopt;
        case net::Connection::ReadStatus::Closed:
          fail(ErrorCode::ProtocolViolation, "server closed the connection before E");
        case net::Connection::ReadStatus::Line: break;
      }
      return wire::parse_server_frame(line);
    }
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, wait, [&] { return !queue_.empty(); })) return std::nullopt;
    Item item = std::move(queue_.front());
    queue_.pop_front();
    if (item.error) std::rethrow_exception(item.error);
    return std::move(item.frame);
  }

 private:
  struct Item {
    std::optional<wire::ServerFrame> frame;
    std::exception_ptr error;
  };

  void push(Item item) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  void read_loop() {
    std::string line;
    for (;;) {
      try {
        if (conn_.read_line(line) != net::Connection::ReadStatus::Line) {
          bool stopping;
          {
            std::lock_guard lock(mutex_);
            stopping = stopping_;
          }
          if (!stopping) fail(ErrorCode::ProtocolViolation, "server closed the connection before E");
          return;
        }
        wire::ServerFrame f = wire::parse_server_frame(line);
        const bool end = std::holds_alternative<wire::End>(f);
        push({std::move(f), nullptr});
        if (end) return;
      } catch (...) {
        push({std::nullopt, std::current_exception()});
        return;
      }
    }
  }

  net::Connection& conn_;
  bool threaded_;
  std::thread reader_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Item> queue_;
  bool stopping_ = false;
};

}  // namespace detail

/// Plays the client side of one replay over an open connection.
inline ClientResult run_client(Detector& detector, net::Connection& conn, const ClientOptions& opt = {}) {
  ClientResult result;
  try {
    conn.write(wire::hello(opt.name));
    conn.flush();
    detail::FrameSource source(conn, opt.pipelined);

    const auto wait_frame = [&](std::chrono::milliseconds wait) {
      auto f = source.next(wait);
      if (!f && wait == opt.timeout)
        fail(ErrorCode::Timeout, "no frame from server within " + std::to_string(opt.timeout.count()) + " ms");
      return f;
    };

    const auto first = wait_frame(opt.timeout);
    const auto* welcome = std::get_if<wire::Welcome>(&*first);
    if (!welcome) fail(ErrorCode::ProtocolViolation, "expected WELCOME as the first frame");
    result.k = welcome->k;

    SplitMix64 rng(derive_seed(opt.seed, 0xC11E));
    std::vector<std::pair<RevisionId, double>> held;
    const auto release = [&](std::size_t i) {
      conn.write(wire::score(held[i].first, held[i].second));
      held.erase(held.begin() + static_cast<std::ptrdiff_t>(i));
    };
    const auto release_all = [&] {
      while (!held.empty()) release(0);
    };

    for (;;) {
      std::optional<wire::ServerFrame> frame;
      if (held.empty()) {
        conn.flush();
        frame = wait_frame(opt.timeout);
      } else {
        frame = source.next(std::chrono::milliseconds(0));
        if (!frame) {
          conn.flush();
          frame = wait_frame(opt.idle);
          if (!frame) {
            // Nothing more is coming until we answer.
            release_all();
            continue;
          }
        }
      }

      if (std::holds_alternative<wire::End>(*frame)) {
        if (!held.empty()) fail(ErrorCode::ProtocolViolation, "server sent E while scores were outstanding");
        conn.flush();
        return result;
      }
      const auto* rev = std::get_if<wire::Revision>(&*frame);
      if (!rev) fail(ErrorCode::ProtocolViolation, "unexpected WELCOME inside the stream");

      const double s = detector.score(rev->record);
      if (!(s >= 0.0 && s <= 1.0))
        fail(ErrorCode::ScoreOutOfRange,
             "detector returned a score outside [0,1] for revision " + std::to_string(rev->record.revision_id),
             rev->record.revision_id);
      result.scores.add(rev->record.revision_id, s);
      held.emplace_back(rev->record.revision_id, s);

      if (opt.expected_total && result.scores.size() >= *opt.expected_total) {
        release_all();
        continue;
      }
      switch (opt.policy) {
        case ReplyPolicy::Immediate: release_all(); break;
        case ReplyPolicy::Lazy:
          while (static_cast<std::int64_t>(held.size()) >= result.k) release(0);
          break;
        case ReplyPolicy::RandomHold: {
          const std::size_t keep = rng.below(static_cast<std::uint64_t>(result.k));
          while (held.size() > keep) release(rng.below(held.size()));
          break;
        }
      }
    }
  } catch (...) {
    conn.close();
    throw;
  }
}

inline ClientResult run_client(Detector& detector, const net::Address& address, const ClientOptions& opt = {}) {
  net::Connection conn = net::connect(address);
  return run_client(detector, conn, opt);
}

}  // namespace wdvdb
