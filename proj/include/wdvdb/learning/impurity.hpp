// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "wdvdb/error.hpp"

namespace wdvdb {

enum class Criterion : std::uint8_t { Gini = 0, Entropy = 1 };

constexpr std::string_view to_string(Criterion c) { return c == Criterion::Gini ? "gini" : "entropy"; }

/// Impurity of a class histogram. Counts may be fractional (sample weights).
inline double impurity(std::span<const double> counts, Criterion criterion) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) fail(ErrorCode::EmptyCounts, "negative class count");
    total += c;
  }
  if (counts.empty() || total <= 0.0) fail(ErrorCode::EmptyCounts, "impurity of an empty histogram");
  double out = criterion == Criterion::Gini ? 1.0 : 0.0;
  for (double c : counts) {
    const double p = c / total;
    if (criterion == Criterion::Gini) out -= p * p;
    else if (p > 0.0) out -= p * std::log2(p);
  }
  return out;
}

namespace detail {

// Two-class fast path used inside split search; `total` must be positive.
inline double impurity2(double neg, double pos, Criterion criterion) noexcept {
  const double total = neg + pos;
  const double p = pos / total;
  const double q = neg / total;
  if (criterion == Criterion::Gini) return 1.0 - p * p - q * q;
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (q > 0.0) h -= q * std::log2(q);
  return h;
}

}  // namespace detail

}  // namespace wdvdb
