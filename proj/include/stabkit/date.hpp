/*
Copyright 2026 the stabkit authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace stabkit {

/// Calendar day. Thin value wrapper over a serial day count so that date
/// arithmetic, ordering and hashing are trivial; ISO-8601 (YYYY-MM-DD) at
/// the I/O boundary.
class Date {
public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  /// Strict ISO-8601 parse; throws ParseError on anything else.
  static Date parse(std::string_view iso);

  /// Days since 1970-01-01.
  static Date from_serial(std::int64_t days);
  std::int64_t serial() const noexcept { return days_; }

  std::string iso() const;
  int year() const;
  unsigned month() const;
  unsigned day() const;

  /// ISO weekday, Monday=1 .. Sunday=7.
  unsigned weekday() const;

  Date plus_days(std::int64_t n) const { return from_serial(days_ + n); }

  auto operator<=>(const Date&) const = default;

private:
  std::int64_t days_ = 0;
};

/// Whole days from `a` to `b` (positive when b is later).
std::int64_t days_between(Date a, Date b);

/// Closed date interval [start, end]. `empty()` when start > end.
struct DateRange {
  Date start;
  Date end;

  bool empty() const noexcept { return start > end; }
  bool contains(Date d) const noexcept { return d >= start && d <= end; }
  /// Calendar days in the closed interval; 0 when empty.
  std::int64_t length_days() const noexcept {
    return empty() ? 0 : days_between(start, end) + 1;
  }

  bool operator==(const DateRange&) const = default;
};

/// The calendar year [Jan 1, Dec 31].
DateRange year_range(int year);

}  // namespace stabkit
