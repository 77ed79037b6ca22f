// SPDX-License-Identifier: Apache-2.0
// A hand-written detector speaking the wire protocol to `wdvdb serve`.
//   wdvdb serve --corpus c.tsv --addr 127.0.0.1:7070 &
//   sample_stream_client 127.0.0.1:7070 > scores.tsv
#include <iostream>
#include <unordered_map>

#include "wdvdb.hpp"

int main(int argc, char** argv) {
  using namespace wdvdb;
  const auto address = net::parse_address(argc > 1 ? argv[1] : "127.0.0.1:7070");

  // Anonymous editors with no history on the item look suspicious.
  std::unordered_map<std::string, int> edits_by_user;
  FunctionDetector detector([&](const RevisionRecord& r) {
    const int seen = edits_by_user[r.user_id]++;
    double s = is_anonymous_user(r.user_id) ? 0.6 : 0.1;
    if (seen > 10) s *= 0.5;
    return s;
  });
  try {
    const ClientResult result = run_client(detector, address);
    write_scores(std::cout, result.scores);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
}
