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

#include "stabkit/fetch.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <set>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "stabkit/csv.hpp"
#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t to_unix_midnight(Date d) { return d.serial() * kSecondsPerDay; }

Date from_unix(std::int64_t ts) {
  // Floor division keeps pre-1970 timestamps on the right day.
  std::int64_t days = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --days;
  return Date::from_serial(days);
}

}  // namespace

MarketDataClient::MarketDataClient(EndpointConfig config, std::filesystem::path cache_dir,
                                   bool offline)
    : config_(std::move(config)), cache_dir_(std::move(cache_dir)), offline_(offline) {
  std::error_code ec;
  std::filesystem::create_directories(cache_dir_, ec);
  if (ec || !std::filesystem::is_directory(cache_dir_)) {
    throw ConfigError("cannot create cache directory '" + cache_dir_.string() + "'");
  }
}

std::filesystem::path MarketDataClient::csv_path(const std::string& asset_id,
                                                 const DateRange& range) const {
  return cache_dir_ / (asset_id + "_" + range.start.iso() + "_" + range.end.iso() + ".csv");
}

FetchOutcome MarketDataClient::fetch_daily_history(const std::string& asset_id,
                                                   const DateRange& range) {
  if (range.empty()) {
    return FetchOutcome{PriceSeries(asset_id, {}), {}, false};
  }
  std::lock_guard<std::mutex> lock(mutex_);
  if (std::filesystem::exists(csv_path(asset_id, range))) {
    return load_cached(asset_id, range);
  }
  if (offline_) {
    throw FetchError("offline mode: no cached history for " + asset_id + " " +
                     range.start.iso() + ".." + range.end.iso());
  }
  FetchOutcome outcome = fetch_remote(asset_id, range);
  store(asset_id, range, outcome);
  return outcome;
}

FetchOutcome MarketDataClient::load_cached(const std::string& asset_id,
                                           const DateRange& range) const {
  FetchOutcome outcome;
  outcome.series = load_price_csv(csv_path(asset_id, range), CsvSchema{}, asset_id);
  outcome.from_cache = true;

  const auto meta_path = csv_path(asset_id, range).string() + ".meta.json";
  std::ifstream meta(meta_path);
  if (meta) {
    nlohmann::json j;
    meta >> j;
    for (const auto& iso : j.value("missing_days", std::vector<std::string>{})) {
      outcome.missing_days.push_back(Date::parse(iso));
    }
  }
  return outcome;
}

void MarketDataClient::store(const std::string& asset_id, const DateRange& range,
                             const FetchOutcome& outcome) const {
  const auto path = csv_path(asset_id, range);
  {
    std::ofstream csv(path);
    if (!csv) throw ConfigError("cannot write cache file '" + path.string() + "'");
    csv << "date,price\n";
    for (const auto& obs : outcome.series.observations()) {
      csv << obs.date.iso() << "," << format_double(obs.price) << "\n";
    }
  }
  nlohmann::json meta;
  meta["asset"] = asset_id;
  meta["start"] = range.start.iso();
  meta["end"] = range.end.iso();
  meta["currency"] = config_.currency;
  meta["endpoint"] = config_.base_url + config_.path;
  meta["rows"] = outcome.series.size();
  auto& missing = meta["missing_days"] = nlohmann::json::array();
  for (const Date& d : outcome.missing_days) missing.push_back(d.iso());
  std::ofstream out(path.string() + ".meta.json");
  out << meta.dump(2) << "\n";
}

FetchOutcome MarketDataClient::fetch_remote(const std::string& asset_id,
                                            const DateRange& range) const {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);

  httplib::Params params{
      {"fsym", asset_id},
      {"tsym", config_.currency},
      {"limit", std::to_string(range.length_days() - 1)},
      {"toTs", std::to_string(to_unix_midnight(range.end))},
  };
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    params.emplace("api_key", key);
  }

  const auto res = client.Get(config_.path, params, httplib::Headers{});
  if (!res) {
    throw FetchError("transport failure contacting " + config_.base_url + ": " +
                         httplib::to_string(res.error()),
                     /*retryable=*/true);
  }
  if (res->status != 200) {
    throw FetchError("HTTP " + std::to_string(res->status) + " from " + config_.base_url,
                     /*retryable=*/res->status >= 500 || res->status == 429);
  }

  nlohmann::json payload;
  try {
    payload = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw FetchError(std::string("unparseable payload: ") + e.what());
  }
  if (payload.value("Response", "") != "Success") {
    throw FetchError("endpoint refused request: " +
                     payload.value("Message", std::string("no message")));
  }
  if (!payload.contains("Data") || !payload["Data"].contains("Data") ||
      !payload["Data"]["Data"].is_array()) {
    throw FetchError("payload missing Data.Data array");
  }

  std::vector<PricePoint> points;
  std::set<Date> seen;
  for (const auto& row : payload["Data"]["Data"]) {
    if (!row.contains("time") || !row.contains("close")) continue;
    const Date d = from_unix(row["time"].get<std::int64_t>());
    if (!range.contains(d)) continue;
    const double close = row["close"].get<double>();
    if (close <= 0.0) continue;  // asset not yet traded; counts as a gap below
    points.push_back(PricePoint{d, close});
    seen.insert(d);
  }

  FetchOutcome outcome;
  outcome.series = PriceSeries(asset_id, std::move(points));
  for (Date d = range.start; d <= range.end; d = d.plus_days(1)) {
    if (!seen.count(d)) outcome.missing_days.push_back(d);
  }
  return outcome;
}

}  // namespace stabkit
