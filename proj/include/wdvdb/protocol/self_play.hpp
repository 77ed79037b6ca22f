// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <span>
#include <thread>

#include "wdvdb/corpus/types.hpp"
#include "wdvdb/protocol/client.hpp"
#include "wdvdb/protocol/server.hpp"
#include "wdvdb/protocol/socket.hpp"

namespace wdvdb {

struct SelfPlayResult {
  StreamTrace trace;
  ClientResult client;
};

/// Server and client in one process over loopback, same wire contract as a
/// two-process run. A client-side failure is rethrown in preference to the
/// disconnect it causes on the server.
inline SelfPlayResult self_play(std::span<const RevisionRecord> revisions, Detector& detector,
                                const ServerConfig& server_config = {}, const ClientOptions& client_options = {}) {
  net::Listener listener(net::Address{"127.0.0.1", 0});
  ReplayServer server(revisions, server_config);
  std::exception_ptr server_error;
  std::thread server_thread([&] {
    try {
      net::Connection conn = listener.accept(server_config.timeout);
      server.run(conn);
    } catch (...) {
      server_error = std::current_exception();
    }
  });

  SelfPlayResult result;
  std::exception_ptr client_error;
  try {
    result.client = run_client(detector, listener.address(), client_options);
  } catch (...) {
    client_error = std::current_exception();
  }
  server_thread.join();
  if (client_error) std::rethrow_exception(client_error);
  if (server_error) std::rethrow_exception(server_error);
  result.trace = server.trace();
  return result;
}

}  // namespace wdvdb
