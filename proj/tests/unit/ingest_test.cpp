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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "stabkit/csv.hpp"
#include "stabkit/date.hpp"
#include "stabkit/errors.hpp"
#include "stabkit/series.hpp"

using namespace stabkit;

namespace {

PriceSeries prices_from(const std::string& csv, const CsvSchema& schema = {},
                        const std::string& tag = "X") {
  std::istringstream in(csv);
  return load_price_csv(in, schema, tag);
}

ReturnSeries make_returns(const std::string& tag, Date start,
                          const std::vector<double>& values, int stride = 1) {
  std::vector<ReturnPoint> pts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    pts.push_back({start.plus_days(static_cast<std::int64_t>(i) * stride), values[i]});
  }
  return ReturnSeries(tag, std::move(pts));
}

}  // namespace

TEST_CASE("date round trips and calendar arithmetic") {
  const Date d(2020, 2, 29);
  CHECK(d.iso() == "2020-02-29");
  CHECK(Date::parse("2020-02-29") == d);
  CHECK(d.year() == 2020);
  CHECK(d.month() == 2);
  CHECK(d.day() == 29);
  CHECK(Date::parse("1970-01-01").serial() == 0);
  CHECK(Date(2016, 1, 1).weekday() == 5);  // a Friday
  CHECK(Date(2016, 1, 2).weekday() == 6);
  CHECK(days_between(Date(2016, 1, 1), Date(2020, 12, 31)) == 1826);
  CHECK(Date(2019, 12, 31).plus_days(1) == Date(2020, 1, 1));

  CHECK_THROWS_AS(Date::parse("2020-13-01"), ParseError);
  CHECK_THROWS_AS(Date::parse("2019-02-29"), ParseError);
  CHECK_THROWS_AS(Date::parse("2020/01/01"), ParseError);
  CHECK_THROWS_AS(Date::parse("20-01-01"), ParseError);
  CHECK_THROWS_AS(Date::parse(""), ParseError);
}

TEST_CASE("date ranges") {
  const DateRange r{Date(2020, 1, 1), Date(2020, 12, 31)};
  CHECK(!r.empty());
  CHECK(r.length_days() == 366);
  CHECK(r.contains(Date(2020, 6, 15)));
  CHECK(!r.contains(Date(2021, 1, 1)));
  CHECK(year_range(2020) == r);

  const DateRange inverted{Date(2021, 1, 1), Date(2020, 1, 1)};
  CHECK(inverted.empty());
  CHECK(inverted.length_days() == 0);

  const DateRange single{Date(2020, 5, 4), Date(2020, 5, 4)};
  CHECK(single.length_days() == 1);
}

TEST_CASE("csv loader parses minimal well-formed input") {
  const auto s = prices_from("date,price\n2020-01-01,100\n2020-01-02,101\n");
  REQUIRE(s.size() == 2);
  CHECK(s.asset_id() == "X");
  CHECK(s.observations()[0].date == Date(2020, 1, 1));
  CHECK(s.observations()[0].price == doctest::Approx(100.0));
  CHECK(s.observations()[1].price == doctest::Approx(101.0));
}

TEST_CASE("csv loader maps schema columns and ignores extras") {
  const CsvSchema schema{"day", "close"};
  const auto s = prices_from("volume,day,close\n5,2020-01-01,100\n9,2020-01-02,101\n", schema);
  REQUIRE(s.size() == 2);
  CHECK(s.observations()[1].price == doctest::Approx(101.0));
}

TEST_CASE("csv loader sorts rows so order does not matter") {
  const auto forward = prices_from("date,price\n2020-01-01,100\n2020-01-02,101\n");
  const auto reversed = prices_from("date,price\n2020-01-02,101\n2020-01-01,100\n");
  REQUIRE(forward.size() == reversed.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    CHECK(forward.observations()[i].date == reversed.observations()[i].date);
    CHECK(forward.observations()[i].price == reversed.observations()[i].price);
  }
}

TEST_CASE("csv loader rejects bad input with useful errors") {
  CHECK_THROWS_AS(prices_from("date,price\n2020-01-02,-5\n"), DomainError);
  CHECK_THROWS_AS(prices_from("date,price\n2020-01-02,0\n"), DomainError);
  CHECK_THROWS_AS(prices_from("date,price\n2020-01-01,100\n2020-01-01,101\n"), IntegrityError);
  CHECK_THROWS_AS(prices_from("time,price\n2020-01-01,100\n"), ParseError);
  CHECK_THROWS_AS(prices_from("date,price\n2020-01-01\n"), ParseError);
  CHECK_THROWS_AS(prices_from("date,price\n2020-01-01,abc\n"), ParseError);
  CHECK_THROWS_AS(prices_from(""), ParseError);

  try {
    prices_from("date,price\n2020-01-01,100\n2020-01-02,oops\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);  // 1-based, counting the header
  }
}

TEST_CASE("to_returns implements annualized log returns") {
  std::vector<PricePoint> obs{{Date(2020, 1, 1), 100.0}, {Date(2020, 1, 2), 100.0}};
  const PriceSeries flat("X", obs);
  const auto r0 = to_returns(flat);
  REQUIRE(r0.size() == 1);
  CHECK(r0.values()[0] == doctest::Approx(0.0));
  CHECK(r0.dates()[0] == Date(2020, 1, 2));  // return dated at the later day

  const PriceSeries eup("X", {{Date(2020, 1, 1), 100.0}, {Date(2020, 1, 2), 100.0 * std::exp(1.0)}});
  CHECK(to_returns(eup).values()[0] == doctest::Approx(365.0));

  const PriceSeries btc("X", {{Date(2020, 1, 1), 430.0}, {Date(2020, 1, 2), 434.3}});
  CHECK(to_returns(btc).values()[0] == doctest::Approx(3.632).epsilon(1e-3));
  CHECK(to_returns(btc, 1.0).values()[0] == doctest::Approx(std::log(434.3 / 430.0)));

  const PriceSeries lone("X", {{Date(2020, 1, 1), 100.0}});
  CHECK_THROWS_AS(to_returns(lone), InsufficientDataError);
}

TEST_CASE("to_returns then cumulative exponentiation recovers the price path") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<PricePoint> obs;
  double p = 250.0;
  for (int i = 0; i < 200; ++i) {
    obs.push_back({Date(2020, 1, 1).plus_days(i), p});
    p *= std::exp(u(rng));
  }
  const PriceSeries series("X", obs);
  const auto r = to_returns(series, 1.0);
  double cum = 1.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    cum *= std::exp(r.values()[i]);
    const double expected = obs[i + 1].price / obs[0].price;
    CHECK(cum == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("align_panel intersect keeps shared dates only") {
  // Mon..Sun axis vs Mon..Fri axis over one week; 2018-01-01 is a Monday.
  const Date mon(2018, 1, 1);
  std::vector<double> seven{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> five{10, 20, 30, 40, 50};
  const auto crypto = make_returns("C", mon, seven);
  const auto market = make_returns("M", mon, five);

  std::vector<ReturnSeries> input{crypto, market};
  const auto panel = align_panel(input);
  CHECK(panel.assets() == std::vector<std::string>{"C", "M"});
  REQUIRE(panel.rows() == 5);
  CHECK(panel.dates().front() == mon);
  CHECK(panel.dates().back() == mon.plus_days(4));
  CHECK(panel.matrix()(4, 0) == doctest::Approx(5.0));
  CHECK(panel.matrix()(4, 1) == doctest::Approx(50.0));
}

TEST_CASE("align_panel intersect on identical axes is the identity") {
  const Date start(2020, 3, 2);
  const auto a = make_returns("A", start, {1, 2, 3});
  const auto b = make_returns("B", start, {4, 5, 6});
  std::vector<ReturnSeries> input{a, b};
  const auto panel = align_panel(input);
  REQUIRE(panel.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(panel.matrix()(i, 0) == doctest::Approx(1.0 + i));
    CHECK(panel.matrix()(i, 1) == doctest::Approx(4.0 + i));
  }
}

TEST_CASE("align_panel crypto-calendar forward-fills closed days with zero") {
  const Date mon(2018, 1, 1);
  const auto crypto = make_returns("C", mon, {1, 2, 3, 4, 5, 6, 7});
  const auto market = make_returns("M", mon, {10, 20, 30, 40, 50});
  std::vector<ReturnSeries> input{crypto, market};
  const auto panel = align_panel(input, AlignPolicy::CryptoCalendar);
  REQUIRE(panel.rows() == 7);
  CHECK(panel.matrix()(5, 0) == doctest::Approx(6.0));
  CHECK(panel.matrix()(5, 1) == doctest::Approx(0.0));  // Saturday
  CHECK(panel.matrix()(6, 1) == doctest::Approx(0.0));  // Sunday
  CHECK(panel.matrix()(4, 1) == doctest::Approx(50.0));
}

TEST_CASE("align_panel error cases") {
  const auto a = make_returns("A", Date(2020, 1, 1), {1, 2, 3});
  const auto b = make_returns("B", Date(2021, 1, 1), {1, 2, 3});
  std::vector<ReturnSeries> disjoint{a, b};
  CHECK_THROWS_AS(align_panel(disjoint), AlignmentError);

  std::vector<ReturnSeries> single{a};
  CHECK_THROWS_AS(align_panel(single), AlignmentError);
}

TEST_CASE("aligned panel slicing and helpers") {
  const Date start(2019, 12, 30);
  const auto a = make_returns("A", start, {1, 2, 3, 4, 5, 6});
  const auto b = make_returns("B", start, {9, 8, 7, 6, 5, 4});
  std::vector<ReturnSeries> input{a, b};
  const auto panel = align_panel(input);

  const auto y2020 = panel.slice(year_range(2020));
  REQUIRE(y2020.rows() == 4);  // 2020-01-01 .. 2020-01-04
  CHECK(y2020.dates().front() == Date(2020, 1, 1));
  CHECK(y2020.column("A")[0] == doctest::Approx(3.0));

  CHECK(panel.has_asset("B"));
  CHECK(!panel.has_asset("Z"));
  CHECK(panel.asset_index("B") == 1);
  CHECK_THROWS_AS(panel.asset_index("Z"), DesignError);
  CHECK(panel.years() == std::vector<int>{2019, 2020});
}

TEST_CASE("describe matches the spreadsheet oracle on random data") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0005, 0.03);
  std::vector<double> values;
  for (int i = 0; i < 400; ++i) values.push_back(g(rng));

  const auto rs = make_returns("A", Date(2019, 1, 1), values);
  const auto s = describe(rs);
  const auto oracle = testsupport::spreadsheet_moments(values);

  CHECK(s.n == 400);
  CHECK(s.mean == doctest::Approx(static_cast<double>(oracle.mean) * 100).epsilon(1e-12));
  CHECK(s.sd == doctest::Approx(static_cast<double>(oracle.sd) * 100).epsilon(1e-12));
  CHECK(s.min == doctest::Approx(static_cast<double>(oracle.min) * 100).epsilon(1e-12));
  CHECK(s.max == doctest::Approx(static_cast<double>(oracle.max) * 100).epsilon(1e-12));
  CHECK(s.skewness == doctest::Approx(static_cast<double>(oracle.skewness)).epsilon(1e-10));
  CHECK(s.kurtosis ==
        doctest::Approx(static_cast<double>(oracle.excess_kurtosis)).epsilon(1e-10));
  CHECK(!s.degenerate);
}

TEST_CASE("describe edge cases") {
  const auto constant = make_returns("A", Date(2020, 1, 1), {0.01, 0.01, 0.01, 0.01});
  const auto s = describe(constant);
  CHECK(s.degenerate);
  CHECK(s.sd == doctest::Approx(0.0));
  CHECK(std::isnan(s.skewness));
  CHECK(std::isnan(s.kurtosis));

  const auto sym = make_returns("A", Date(2020, 1, 1), {-1, 1, -1, 1, -1, 1});
  const auto t = describe(sym);
  CHECK(t.mean == doctest::Approx(0.0));
  CHECK(t.skewness == doctest::Approx(0.0));

  const auto tiny = make_returns("A", Date(2020, 1, 1), {1, 2, 3});
  CHECK_THROWS_AS(describe(tiny), InsufficientDataError);
}

TEST_CASE("describe is order invariant") {
  std::vector<double> values{0.03, -0.01, 0.02, 0.05, -0.04, 0.0, 0.011};
  auto reversed = values;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = describe(make_returns("A", Date(2020, 1, 1), values));
  const auto b = describe(make_returns("A", Date(2020, 1, 1), reversed));
  CHECK(a.mean == doctest::Approx(b.mean));
  CHECK(a.sd == doctest::Approx(b.sd));
  CHECK(a.min == doctest::Approx(b.min));
  CHECK(a.max == doctest::Approx(b.max));
  CHECK(a.skewness == doctest::Approx(b.skewness));
  CHECK(a.kurtosis == doctest::Approx(b.kurtosis));
}

TEST_CASE("moving_average") {
  const auto r = make_returns("A", Date(2020, 1, 1), {1, 2, 3, 4});
  const auto w2 = moving_average(r, 2);
  REQUIRE(w2.size() == 3);
  CHECK(w2.values()[0] == doctest::Approx(1.5));
  CHECK(w2.values()[1] == doctest::Approx(2.5));
  CHECK(w2.values()[2] == doctest::Approx(3.5));
  CHECK(w2.dates()[0] == Date(2020, 1, 2));  // stamped at window end

  const auto w1 = moving_average(r, 1);
  REQUIRE(w1.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(w1.values()[i] == doctest::Approx(r.values()[i]));

  const auto constant = make_returns("A", Date(2020, 1, 1), {5, 5, 5, 5, 5});
  const auto wc = moving_average(constant, 3);
  for (const double v : wc.values()) CHECK(v == doctest::Approx(5.0));

  // window = length: single value equal to the input mean
  const auto full = moving_average(r, 4);
  REQUIRE(full.size() == 1);
  CHECK(full.values()[0] == doctest::Approx(2.5));

  CHECK_THROWS_AS(moving_average(r, 5), InsufficientDataError);
  CHECK_THROWS_AS(moving_average(r, 0), DomainError);
}
