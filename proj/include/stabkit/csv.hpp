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
#include <istream>
#include <string>

#include "stabkit/series.hpp"

namespace stabkit {

/// Column names the price CSV loader should look up in the header row.
struct CsvSchema {
  std::string date_column = "date";
  std::string price_column = "price";
};

/// Parse a UTF-8 price CSV with a header row. Rows are sorted ascending by
/// date; duplicate dates and non-positive prices are rejected.
PriceSeries load_price_csv(std::istream& source, const CsvSchema& schema,
                           const std::string& asset_id);

/// File convenience wrapper; asset_id defaults to the file stem.
PriceSeries load_price_csv(const std::filesystem::path& file, const CsvSchema& schema = {},
                           std::string asset_id = {});

/// Deterministic float formatting used by every CSV/JSON artifact writer
/// ("%.12g", locale independent).
std::string format_double(double v);

}  // namespace stabkit
