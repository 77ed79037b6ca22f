// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wdvdb/error.hpp"
#include "wdvdb/evaluation/scores.hpp"

namespace wdvdb {

/// Per-revision mean over detectors. All tables must cover the same ids; the
/// result follows the first table's order.
inline ScoreTable meta_mean(std::span<const ScoreTable> tables) {
  if (tables.empty()) fail(ErrorCode::EmptyData, "meta_mean needs at least one score table");
  const ScoreTable& first = tables.front();
  std::unordered_map<RevisionId, std::size_t> pos;
  pos.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) pos.emplace(first.ids[i], i);

  std::vector<double> sum(first.scores);
  for (std::size_t t = 1; t < tables.size(); ++t) {
    const ScoreTable& other = tables[t];
    if (other.size() != first.size())
      fail(ErrorCode::IdSetMismatch, "score table " + std::to_string(t) + " covers a different id set");
    std::vector<bool> hit(first.size(), false);
    for (std::size_t i = 0; i < other.size(); ++i) {
      const auto it = pos.find(other.ids[i]);
      if (it == pos.end() || hit[it->second])
        fail(ErrorCode::IdSetMismatch, "revision " + std::to_string(other.ids[i]) + " is not matched one-to-one in the first table",
             other.ids[i]);
      hit[it->second] = true;
      sum[it->second] += other.scores[i];
    }
  }
  ScoreTable out;
  out.ids = first.ids;
  out.scores.resize(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) out.scores[i] = sum[i] / static_cast<double>(tables.size());
  return out;
}

}  // namespace wdvdb
