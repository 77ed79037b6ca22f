// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/protocol/socket.hpp"
#include "wdvdb/protocol/trace.hpp"
#include "wdvdb/protocol/window.hpp"
#include "wdvdb/protocol/wire.hpp"

namespace wdvdb {

struct ServerConfig {
  std::int64_t k = 16;
  std::chrono::milliseconds timeout{60'000};  // per wait for the next score
};

/// Replays `revisions` to one connected client. On failure the trace keeps
/// everything recorded up to the error, without END.
class ReplayServer {
 public:
  ReplayServer(std::span<const RevisionRecord> revisions, ServerConfig config)
      : config_(config), window_(revisions, config.k) {}

  const StreamTrace& trace() const noexcept { return window_.trace(); }
  const std::string& client_name() const noexcept { return client_name_; }

  const StreamTrace& run(net::Connection& conn) {
    std::string line;
    std::int64_t line_no = 0;
    const auto next_frame = [&]() -> wire::ClientFrame {
      switch (conn.read_line(line, config_.timeout)) {
        case net::Connection::ReadStatus::Closed:
          fail(ErrorCode::ClientDisconnect,
               "client closed the connection after seq " + std::to_string(window_.trace().events.size()),
               static_cast<std::int64_t>(window_.trace().events.size()));
        case net::Connection::ReadStatus::TimedOut: {
          const RevisionId id = window_.oldest_open();
          fail(ErrorCode::Timeout, "no score for revision " + std::to_string(id) + " within " +
                                       std::to_string(config_.timeout.count()) + " ms",
               id);
        }
        case net::Connection::ReadStatus::Line: break;
      }
      return wire::parse_client_frame(line, ++line_no);
    };

    const auto hello = next_frame();
    if (!std::holds_alternative<wire::Hello>(hello)) wire::detail::violation(line);
    client_name_ = std::get<wire::Hello>(hello).client_name;
    conn.write(wire::welcome(window_.k()));

    for (;;) {
      while (window_.can_send()) conn.write(wire::revision(window_.send()));
      if (window_.all_scored()) {
        conn.write(wire::end());
        conn.flush();
        window_.end();
        return window_.trace();
      }
      conn.flush();
      const auto frame = next_frame();
      const auto* s = std::get_if<wire::Score>(&frame);
      if (!s) wire::detail::violation(line);
      window_.score(s->revision_id, s->score);
    }
  }

 private:
  ServerConfig config_;
  ReplayWindow window_;
  std::string client_name_;
};

/// Accepts one client on `listener` and replays to it.
inline StreamTrace serve(net::Listener& listener, std::span<const RevisionRecord> revisions,
                         const ServerConfig& config = {}) {
  ReplayServer server(revisions, config);
  net::Connection conn = listener.accept(config.timeout);
  return server.run(conn);
}

}  // namespace wdvdb
