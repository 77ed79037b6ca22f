// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "wdvdb/error.hpp"

namespace wdvdb {

namespace detail {

inline void check_lengths(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) fail(ErrorCode::ArityMismatch, "scores and labels differ in length");
}

// Indices sorted by score; `descending` picks the direction. Stable for ties.
inline std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace detail

/// Mann-Whitney statistic with average ranks for ties.
inline double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  detail::check_lengths(scores, labels);
  const auto idx = detail::order_by_score(scores, false);
  double pos = 0, neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    double group_pos = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) group_pos += labels[idx[j++]] ? 1 : 0;
    // Ranks i+1..j share their mean.
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += group_pos * avg_rank;
    pos += group_pos;
    neg += static_cast<double>(j - i) - group_pos;
    i = j;
  }
  if (pos == 0 || neg == 0) fail(ErrorCode::SingleClass, "ROC AUC needs both classes");
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

/// Average precision; a group of equal scores counts as one step.
inline double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  detail::check_lengths(scores, labels);
  const double total_pos = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](auto y) { return y; }));
  if (total_pos == 0) fail(ErrorCode::NoPositives, "PR AUC needs at least one positive");
  const auto idx = detail::order_by_score(scores, true);
  double tp = 0, fp = 0, ap = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    double gp = 0, gn = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) (labels[idx[j++]] ? gp : gn) += 1;
    tp += gp;
    fp += gn;
    if (gp > 0) ap += (gp / total_pos) * (tp / (tp + fp));
    i = j;
  }
  return ap;
}

/// Metrics at a fixed threshold; a revision is predicted vandalism iff score >= t.
/// Undefined values are empty.
struct ThresholdMetrics {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  bool operator==(const ThresholdMetrics&) const = default;
};

inline ThresholdMetrics threshold_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                          double t = 0.5) {
  detail::check_lengths(scores, labels);
  ThresholdMetrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= t;
    if (labels[i]) (predicted ? m.tp : m.fn)++;
    else (predicted ? m.fp : m.tn)++;
  }
  const auto d = [](std::int64_t x) { return static_cast<double>(x); };
  const std::int64_t n = m.tp + m.fp + m.tn + m.fn;
  if (n > 0) m.accuracy = d(m.tp + m.tn) / d(n);
  if (m.tp + m.fp > 0) m.precision = d(m.tp) / d(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = d(m.tp) / d(m.tp + m.fn);
  if (m.precision && m.recall)
    m.f1 = *m.precision + *m.recall > 0 ? 2 * *m.precision * *m.recall / (*m.precision + *m.recall) : 0.0;
  return m;
}

}  // namespace wdvdb
