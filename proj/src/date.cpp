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

#include "stabkit/date.hpp"

#include <cctype>
#include <cstdio>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(std::int64_t serial) {
  return chr::year_month_day{chr::sys_days{chr::days{serial}}};
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) {
    throw DomainError("invalid calendar day: " + std::to_string(year) + "-" +
                      std::to_string(month) + "-" + std::to_string(day));
  }
  days_ = chr::sys_days{ymd}.time_since_epoch().count();
}

Date Date::parse(std::string_view iso) {
  // Exactly YYYY-MM-DD.
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw ParseError("expected ISO-8601 date (YYYY-MM-DD), got '" + std::string(iso) + "'");
  }
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(iso[i]))) {
      throw ParseError("expected ISO-8601 date (YYYY-MM-DD), got '" + std::string(iso) + "'");
    }
  }
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (iso[i] - '0');
    return v;
  };
  const int y = digits(0, 4);
  const int m = digits(5, 2);
  const int d = digits(8, 2);
  try {
    return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
  } catch (const DomainError&) {
    throw ParseError("invalid calendar day '" + std::string(iso) + "'");
  }
}

Date Date::from_serial(std::int64_t days) {
  Date d;
  d.days_ = days;
  return d;
}

std::string Date::iso() const {
  const auto ymd = to_ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

int Date::year() const { return int(to_ymd(days_).year()); }
unsigned Date::month() const { return unsigned(to_ymd(days_).month()); }
unsigned Date::day() const { return unsigned(to_ymd(days_).day()); }

unsigned Date::weekday() const {
  const chr::weekday wd{chr::sys_days{chr::days{days_}}};
  return wd.iso_encoding();
}

std::int64_t days_between(Date a, Date b) { return b.serial() - a.serial(); }

DateRange year_range(int year) {
  return DateRange{Date(year, 1, 1), Date(year, 12, 31)};
}

}  // namespace stabkit
