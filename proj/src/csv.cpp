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

#include "stabkit/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

double parse_price(const std::string& text, std::size_t line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw ParseError("cannot parse price '" + text + "'", line_no);
  }
  return v;
}

}  // namespace

PriceSeries load_price_csv(std::istream& source, const CsvSchema& schema,
                           const std::string& asset_id) {
  std::string line;
  if (!std::getline(source, line)) {
    throw ParseError("empty input: missing header row", 1);
  }
  const auto header = split_row(line);
  std::size_t date_col = header.size(), price_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.date_column) date_col = i;
    if (header[i] == schema.price_column) price_col = i;
  }
  if (date_col == header.size()) {
    throw ParseError("header has no '" + schema.date_column + "' column", 1);
  }
  if (price_col == header.size()) {
    throw ParseError("header has no '" + schema.price_column + "' column", 1);
  }

  std::vector<PricePoint> rows;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_row(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()), line_no);
    }
    Date d;
    try {
      d = Date::parse(fields[date_col]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    const double price = parse_price(fields[price_col], line_no);
    if (price <= 0.0) {
      throw DomainError("non-positive price " + fields[price_col] + " at " + d.iso() +
                        " (line " + std::to_string(line_no) + ")");
    }
    rows.push_back({d, price});
  }
  return PriceSeries(asset_id, std::move(rows));
}

PriceSeries load_price_csv(const std::filesystem::path& file, const CsvSchema& schema,
                           std::string asset_id) {
  std::ifstream in(file);
  if (!in) {
    throw ParseError("cannot open '" + file.string() + "'");
  }
  if (asset_id.empty()) asset_id = file.stem().string();
  return load_price_csv(in, schema, asset_id);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace stabkit
