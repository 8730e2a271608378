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

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "stabkit/date.hpp"
#include "stabkit/series.hpp"

namespace stabkit {

/// Where and how daily close histories are requested. The endpoint speaks a
/// histoday-style JSON protocol:
///   GET {path}?fsym=SYM&tsym=CUR&limit=N&toTs=UNIX[&api_key=K]
///   -> { "Response": "Success", "Data": { "Data": [ {"time": u, "close": p}, ... ] } }
/// The API key, when required, is read from the environment rather than
/// configuration files.
struct EndpointConfig {
  std::string base_url;                           ///< e.g. "https://min-api.cryptocompare.com"
  std::string path = "/data/v2/histoday";
  std::string currency = "USD";
  std::string api_key_env = "STABKIT_API_KEY";
};

/// Fetch result. Days inside the requested range with no usable close are
/// reported in `missing_days` rather than treated as fatal.
struct FetchOutcome {
  PriceSeries series;
  std::vector<Date> missing_days;
  bool from_cache = false;
};

/// Daily-close client with an on-disk cache keyed by (asset, range): one CSV
/// per request plus a JSON sidecar of fetch metadata. Repeated calls for the
/// same key are served from the cache with zero network traffic. Requests
/// are serialized per client instance; use separate instances (sharing a
/// cache directory is fine) to fetch distinct assets concurrently.
class MarketDataClient {
public:
  /// Throws ConfigError when the cache directory cannot be created. With
  /// `offline` set, cache misses raise FetchError instead of touching the
  /// network.
  MarketDataClient(EndpointConfig config, std::filesystem::path cache_dir,
                   bool offline = false);

  /// Daily closes for the closed range. An empty range yields an empty
  /// series without network or cache traffic. Transport failures raise a
  /// retryable FetchError; malformed or refused payloads a permanent one.
  FetchOutcome fetch_daily_history(const std::string& asset_id, const DateRange& range);

  const std::filesystem::path& cache_dir() const noexcept { return cache_dir_; }

private:
  std::filesystem::path csv_path(const std::string& asset_id, const DateRange& range) const;

  FetchOutcome load_cached(const std::string& asset_id, const DateRange& range) const;
  void store(const std::string& asset_id, const DateRange& range,
             const FetchOutcome& outcome) const;
  FetchOutcome fetch_remote(const std::string& asset_id, const DateRange& range) const;

  EndpointConfig config_;
  std::filesystem::path cache_dir_;
  bool offline_;
  std::mutex mutex_;
};

}  // namespace stabkit
