// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wdvdb/corpus/split.hpp"
#include "wdvdb/corpus/types.hpp"
#include "wdvdb/error.hpp"
#include "wdvdb/evaluation/metrics.hpp"
#include "wdvdb/evaluation/scores.hpp"
#include "wdvdb/util/time.hpp"

namespace wdvdb {

/// Scores joined with labels and the attributes the breakdowns need.
struct ScoredDataset {
  std::vector<RevisionId> ids;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  std::vector<Timestamp> timestamps;
  std::vector<ContentType> content_types;
  std::vector<std::uint8_t> registered;
  std::vector<std::string> users;

  std::size_t size() const noexcept { return ids.size(); }
  std::int64_t positives() const {
    return std::count_if(labels.begin(), labels.end(), [](std::uint8_t y) { return y != 0; });
  }

  void push(RevisionId id, double score, bool label, const RevisionRecord& r) {
    ids.push_back(id);
    scores.push_back(score);
    labels.push_back(label ? 1 : 0);
    timestamps.push_back(r.timestamp);
    content_types.push_back(r.content_type);
    registered.push_back(is_anonymous_user(r.user_id) ? 0 : 1);
    users.push_back(r.user_id);
  }

  template <typename Pred>
  ScoredDataset filter(Pred keep) const {
    ScoredDataset out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!keep(i)) continue;
      out.ids.push_back(ids[i]);
      out.scores.push_back(scores[i]);
      out.labels.push_back(labels[i]);
      out.timestamps.push_back(timestamps[i]);
      out.content_types.push_back(content_types[i]);
      out.registered.push_back(registered[i]);
      out.users.push_back(users[i]);
    }
    return out;
  }
};

/// Joins a score table with the corpus and its ground truth.
inline ScoredDataset build_dataset(const ScoreTable& scores, std::span<const RevisionRecord> revisions,
                                   const GroundTruth& truth) {
  std::unordered_map<RevisionId, const RevisionRecord*> by_id;
  by_id.reserve(revisions.size());
  for (const auto& r : revisions) by_id.emplace(r.revision_id, &r);
  std::unordered_map<RevisionId, bool> label;
  label.reserve(truth.size());
  for (const auto& e : truth) label.emplace(e.revision_id, e.is_vandalism);

  ScoredDataset d;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const RevisionId id = scores.ids[i];
    const auto r = by_id.find(id);
    if (r == by_id.end()) fail(ErrorCode::UnknownRevision, "scored revision " + std::to_string(id) + " not in corpus", id);
    const auto l = label.find(id);
    if (l == label.end()) fail(ErrorCode::MissingLabel, "no label for revision " + std::to_string(id), id);
    d.push(id, scores.scores[i], l->second, *r->second);
  }
  return d;
}

/// ROC/PR of a dataset, empty when a class is missing.
struct AucPair {
  std::int64_t n = 0;
  std::int64_t positives = 0;
  std::optional<double> roc_auc;
  std::optional<double> pr_auc;

  bool available() const noexcept { return roc_auc.has_value(); }
  bool operator==(const AucPair&) const = default;
};

inline AucPair auc_pair(const ScoredDataset& d) {
  AucPair p;
  p.n = static_cast<std::int64_t>(d.size());
  p.positives = d.positives();
  if (p.positives > 0 && p.positives < p.n) {
    p.roc_auc = roc_auc(d.scores, d.labels);
    p.pr_auc = pr_auc(d.scores, d.labels);
  }
  return p;
}

struct SubsetMetrics {
  std::string name;
  AucPair metrics;
  bool operator==(const SubsetMetrics&) const = default;
};

/// HEAD, BODY, registered and unregistered views, in that order.
inline std::vector<SubsetMetrics> subset_report(const ScoredDataset& d) {
  return {
      {"HEAD", auc_pair(d.filter([&](std::size_t i) { return d.content_types[i] == ContentType::Head; }))},
      {"BODY", auc_pair(d.filter([&](std::size_t i) { return d.content_types[i] == ContentType::Body; }))},
      {"registered", auc_pair(d.filter([&](std::size_t i) { return d.registered[i] != 0; }))},
      {"unregistered", auc_pair(d.filter([&](std::size_t i) { return d.registered[i] == 0; }))},
  };
}

struct WeeklyPoint {
  time::IsoWeek week;
  AucPair metrics;
  bool operator==(const WeeklyPoint&) const = default;
};

/// Metrics per ISO-8601 week, in week order.
inline std::vector<WeeklyPoint> weekly_roc(const ScoredDataset& d) {
  std::map<time::IsoWeek, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < d.size(); ++i) groups[time::iso_week(d.timestamps[i])].push_back(i);
  std::vector<WeeklyPoint> out;
  for (const auto& [week, rows] : groups) {
    std::unordered_set<std::size_t> keep(rows.begin(), rows.end());
    out.push_back({week, auc_pair(d.filter([&](std::size_t i) { return keep.contains(i); }))});
  }
  return out;
}

/// Rows matching every set criterion are removed.
class ExclusionFilter {
 public:
  ExclusionFilter(std::optional<std::string> user, std::optional<TimeInterval> interval,
                  std::optional<std::unordered_set<RevisionId>> ids)
      : user_(std::move(user)), interval_(interval), ids_(std::move(ids)) {
    if (!user_ && !interval_ && !ids_) fail(ErrorCode::InvalidFilter, "exclusion filter needs at least one criterion");
  }

  bool matches(const ScoredDataset& d, std::size_t i) const {
    if (user_ && d.users[i] != *user_) return false;
    if (interval_ && !interval_->contains(d.timestamps[i])) return false;
    if (ids_ && !ids_->contains(d.ids[i])) return false;
    return true;
  }

  /// Human-readable criteria, e.g. "user=Editor1;from=...;to=...".
  std::string describe() const {
    std::string s;
    const auto add = [&](const std::string& part) { s += (s.empty() ? "" : ";") + part; };
    if (user_) add("user=" + *user_);
    if (interval_) {
      add("from=" + time::format_iso8601(interval_->from));
      add("to=" + time::format_iso8601(interval_->to));
    }
    if (ids_) add("ids=" + std::to_string(ids_->size()));
    return s;
  }

 private:
  std::optional<std::string> user_;
  std::optional<TimeInterval> interval_;
  std::optional<std::unordered_set<RevisionId>> ids_;
};

struct ExclusionResult {
  ScoredDataset dataset;
  std::int64_t removed = 0;
};

inline ExclusionResult apply_exclusion(const ScoredDataset& d, const ExclusionFilter& f) {
  ExclusionResult r;
  r.dataset = d.filter([&](std::size_t i) { return !f.matches(d, i); });
  r.removed = static_cast<std::int64_t>(d.size() - r.dataset.size());
  if (r.dataset.size() == 0 && d.size() > 0) fail(ErrorCode::EmptyResult, "exclusion removed every row");
  return r;
}

}  // namespace wdvdb
