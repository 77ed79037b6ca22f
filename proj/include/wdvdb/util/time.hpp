// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "wdvdb/util/text.hpp"

namespace wdvdb {

/// UTC epoch seconds.
using Timestamp = std::int64_t;

namespace time {

inline std::chrono::sys_days day_of(Timestamp t) {
  using namespace std::chrono;
  return floor<days>(sys_seconds{seconds{t}});
}

inline Timestamp from_civil(int y, unsigned mon, unsigned dom, int hh = 0, int mm = 0, int ss = 0) {
  namespace c = std::chrono;
  const c::sys_days date = c::year{y} / c::month{mon} / c::day{dom};
  return static_cast<Timestamp>(date.time_since_epoch().count()) * 86400 + hh * 3600 + mm * 60 + ss;
}

/// Accepts "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SSZ" (UTC only).
inline std::optional<Timestamp> parse_iso8601(std::string_view s) {
  const auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    if (pos + len > s.size()) return std::nullopt;
    return text::parse_int<int>(s.substr(pos, len));
  };
  if (s.size() != 10 && s.size() != 20) return std::nullopt;
  if (s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto y = num(0, 4), mo = num(5, 2), d = num(8, 2);
  if (!y || !mo || !d) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (s.size() == 20) {
    if (s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z') return std::nullopt;
    const auto h = num(11, 2), mi = num(14, 2), se = num(17, 2);
    if (!h || !mi || !se || *h > 23 || *mi > 59 || *se > 60) return std::nullopt;
    hh = *h;
    mm = *mi;
    ss = *se;
  }
  return from_civil(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d), hh, mm, ss);
}

inline std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = day_of(t);
  const year_month_day ymd{day};
  const Timestamp secs = t - static_cast<Timestamp>(day.time_since_epoch().count()) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

inline int hour_of_day(Timestamp t) {
  const Timestamp secs = t - static_cast<Timestamp>(day_of(t).time_since_epoch().count()) * 86400;
  return static_cast<int>(secs / 3600);
}

/// Monday = 0 ... Sunday = 6.
inline int day_of_week(Timestamp t) {
  return static_cast<int>(std::chrono::weekday{day_of(t)}.iso_encoding()) - 1;
}

struct IsoWeek {
  int year = 0;
  int week = 0;
  auto operator<=>(const IsoWeek&) const = default;
};

/// ISO-8601 week-numbering year and week of `t`.
inline IsoWeek iso_week(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = day_of(t);
  // The Thursday of the same ISO week decides the week-numbering year.
  const int dow = day_of_week(t);
  const sys_days thursday = day - days{dow} + days{3};
  const year y = year_month_day{thursday}.year();
  const sys_days jan1 = y / January / 1;
  const int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
  return {static_cast<int>(y), week};
}

}  // namespace time
}  // namespace wdvdb
