// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "wdvdb.hpp"

namespace wdvdb::testing {

inline RevisionRecord revision(RevisionId id, std::string item, std::string user, std::string comment = "",
                               Timestamp ts = 0) {
  RevisionRecord r;
  r.revision_id = id;
  r.timestamp = ts ? ts : time::from_civil(2016, 5, 2) + id;
  r.item_id = std::move(item);
  r.user_id = std::move(user);
  r.comment = comment.empty() ? "/* wbsetlabel-set:1|en */ label " + std::to_string(id) : std::move(comment);
  r.content_type = ContentType::Head;
  return r;
}

/// Code of the wdvdb::Error thrown by `f`; fails the test if nothing is thrown.
inline ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Usage;
}

/// A small generated corpus for tests that need realistic streams.
inline GeneratedCorpus small_corpus(std::int64_t n = 5000, std::uint64_t seed = 42, double rate = 0.03) {
  SynthConfig cfg;
  cfg.n_revisions = n;
  cfg.n_users = std::max<std::int64_t>(50, n / 30);
  cfg.n_items = std::max<std::int64_t>(100, n / 15);
  cfg.vandalism_rate = rate;
  cfg.seed = seed;
  return generate_corpus(cfg);
}

}  // namespace wdvdb::testing
