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

// Regenerates the bundled 2016-2020 daily price fixtures plus the matching
// pipeline config. The panel is synthetic but bookkeeping-faithful: the
// crypto tickers and MSCI sit on a 1259-day axis (1258 returns), the four
// exchange-traded series on a 1250-day axis (1249 returns, a subset of the
// former), and each series is affinely calibrated so its daily mean and
// standard deviation hit the documented reference values exactly. Shapes
// beyond the first two moments (tails, jumps, cross-correlations) are only
// qualitatively plausible.
//
// Usage: stabkit_fixtures [repo_root]   (default: current directory)

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stabkit/date.hpp"

namespace {

using stabkit::Date;

constexpr std::uint64_t kSeed = 0x5717ab1e20160101ull;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::uint64_t combine(std::uint64_t stream, std::uint64_t day) {
  return mix64(kSeed ^ mix64(stream * 0x9e3779b97f4a7c15ull) ^ mix64(day + 0x165667b19e3779f9ull));
}

double gauss(std::uint64_t stream, std::uint64_t day) {
  std::mt19937_64 eng(combine(stream, day));
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(eng);
}

double uniform(std::uint64_t stream, std::uint64_t day) {
  std::mt19937_64 eng(combine(stream, day));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(eng);
}

struct AssetSpec {
  const char* tag;
  double mean_pct;   // calibrated daily mean, percent
  double sd_pct;     // calibrated daily standard deviation, percent
  double jump_skew;  // sign/size of the rare-jump term
  double p0;         // first price
  bool crypto_axis;  // 1259-day axis when true, 1250-day axis otherwise
  bool crypto_group; // factor loading group
};

const AssetSpec kAssets[] = {
    {"BTC", 0.446, 4.695, -0.6, 430.0, true, true},
    {"ETH", 0.804, 7.567, 1.2, 0.95, true, true},
    {"XRP", 0.648, 9.159, 2.4, 0.0065, true, true},
    {"JPY", 0.022, 1.400, 0.8, 0.008310, false, false},
    {"EUR", 0.012, 0.647, 0.3, 1.0862, false, false},
    {"GOLD", 0.049, 0.872, -0.4, 1060.2, false, false},
    {"SP500", 0.057, 1.211, -1.0, 2038.2, false, false},
    {"MSCI", 0.045, 1.023, -1.1, 399.4, true, false},
};

std::string format_price(double p) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", p);
  return buf;
}

void write_csv(const std::filesystem::path& file, const std::vector<Date>& dates,
               const std::vector<double>& prices) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << file << "\n";
    std::exit(1);
  }
  out << "date,price\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out << dates[i].iso() << "," << format_price(prices[i]) << "\n";
  }
}

const char* kConfigJson = R"({
  "assets": [
    {"tag": "BTC", "source": "csv", "path": "../data/fixtures/BTC.csv"},
    {"tag": "ETH", "source": "csv", "path": "../data/fixtures/ETH.csv"},
    {"tag": "XRP", "source": "csv", "path": "../data/fixtures/XRP.csv"},
    {"tag": "JPY", "source": "csv", "path": "../data/fixtures/JPY.csv"},
    {"tag": "EUR", "source": "csv", "path": "../data/fixtures/EUR.csv"},
    {"tag": "GOLD", "source": "csv", "path": "../data/fixtures/GOLD.csv"},
    {"tag": "SP500", "source": "csv", "path": "../data/fixtures/SP500.csv"},
    {"tag": "MSCI", "source": "csv", "path": "../data/fixtures/MSCI.csv"}
  ],
  "range": {"start": "2016-01-01", "end": "2020-12-31"},
  "alignment": "intersect",
  "filter_scope": "full-sample",
  "baseline_assets": ["JPY", "EUR", "GOLD", "SP500", "MSCI"],
  "cusum_windows": [
    {"label": "2016-2020", "start": "2016-01-01", "end": "2020-12-31"},
    {"label": "2017-2020", "start": "2017-01-01", "end": "2020-12-31"},
    {"label": "2018-2020", "start": "2018-01-01", "end": "2020-12-31"},
    {"label": "2019-2020", "start": "2019-01-01", "end": "2020-12-31"}
  ],
  "dtw_plot_pair": ["BTC", "GOLD"],
  "output_dir": "../out/fixture",
  "cache_dir": "../cache",
  "seed": 20160101,
  "plots": true
}
)";

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : ".";
  const std::filesystem::path fixture_dir = root / "data" / "fixtures";
  const std::filesystem::path config_dir = root / "configs";
  std::filesystem::create_directories(fixture_dir);
  std::filesystem::create_directories(config_dir);

  // Weekday axis over 2016-01-01 .. 2020-12-31 (exactly 261 weeks, 1305
  // weekdays), thinned by two deterministic holiday sets: 46 closures shared
  // by every series and 9 extra closures for the exchange-traded four.
  std::vector<Date> weekdays;
  for (Date d(2016, 1, 1); d <= Date(2020, 12, 31); d = d.plus_days(1)) {
    if (d.weekday() <= 5) weekdays.push_back(d);
  }
  if (weekdays.size() != 1305) {
    std::cerr << "unexpected weekday count " << weekdays.size() << "\n";
    return 1;
  }
  std::set<std::size_t> shared_holidays, extra_holidays;
  for (std::size_t k = 0; k < 46; ++k) shared_holidays.insert(k * 28 + 7);
  for (std::size_t k = 0; k < 9; ++k) extra_holidays.insert(k * 130 + 16);

  std::vector<Date> crypto_axis, traded_axis;
  for (std::size_t i = 0; i < weekdays.size(); ++i) {
    if (shared_holidays.count(i)) continue;
    crypto_axis.push_back(weekdays[i]);
    if (!extra_holidays.count(i)) traded_axis.push_back(weekdays[i]);
  }
  if (crypto_axis.size() != 1259 || traded_axis.size() != 1250) {
    std::cerr << "axis sizes off: " << crypto_axis.size() << "/" << traded_axis.size() << "\n";
    return 1;
  }

  for (std::size_t a = 0; a < std::size(kAssets); ++a) {
    const AssetSpec& spec = kAssets[a];
    const std::vector<Date>& axis = spec.crypto_axis ? crypto_axis : traded_axis;

    // Raw shocks: a panel-wide factor, a group factor, heavy-tailed
    // idiosyncratic noise and rare one-sided jumps. The crypto group also
    // carries a boom/bust drift regime (strong positive drift in 2017, a
    // crash profile in 2018) so that full-sample mean-stability tests see a
    // genuine break in those series while the exchange-traded four stay
    // parameter-stable throughout.
    std::vector<double> z;
    z.reserve(axis.size() - 1);
    for (std::size_t i = 1; i < axis.size(); ++i) {
      const auto day = static_cast<std::uint64_t>(axis[i].serial());
      const double market = gauss(1, day);
      const double group = gauss(spec.crypto_group ? 2 : 3, day);
      const double idio = gauss(100 + a, day);
      const double tail = uniform(200 + a, day) < 0.08 ? 3.0 : 1.0;
      double shock;
      if (spec.crypto_group) {
        shock = 0.15 * market + 0.55 * group + 0.85 * idio * tail;
        switch (axis[i].year()) {
          case 2017: shock += 0.42; break;
          case 2018: shock -= 0.46; break;
          case 2019: shock += 0.08; break;
          default: break;
        }
      } else {
        shock = 0.45 * market + 0.35 * group + 0.70 * idio * tail;
      }
      if (uniform(300 + a, day) < 0.03) {
        shock += spec.jump_skew * std::abs(gauss(400 + a, day)) * 2.0;
      }
      z.push_back(shock);
    }

    // Affine calibration: sample mean and (Bessel) sd of the daily returns
    // land exactly on the reference values.
    double mean = 0.0;
    for (const double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double ss = 0.0;
    for (const double v : z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(z.size() - 1));
    const double target_mean = spec.mean_pct / 100.0;
    const double target_sd = spec.sd_pct / 100.0;

    std::vector<double> prices;
    prices.reserve(axis.size());
    prices.push_back(spec.p0);
    for (const double v : z) {
      const double r = (v - mean) / sd * target_sd + target_mean;
      prices.push_back(prices.back() * std::exp(r));
    }
    write_csv(fixture_dir / (std::string(spec.tag) + ".csv"), axis, prices);
    std::cout << spec.tag << ": " << axis.size() << " prices, " << z.size() << " returns\n";
  }

  std::ofstream config(config_dir / "fixture_panel.json", std::ios::binary);
  config << kConfigJson;
  std::cout << "wrote " << (config_dir / "fixture_panel.json").string() << "\n";
  return 0;
}
