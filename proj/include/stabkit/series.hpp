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

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "stabkit/date.hpp"

namespace stabkit {

struct PricePoint {
  Date date;
  double price;  // strictly positive, USD
};

/// Dated daily close prices for one asset. Observations are kept sorted by
/// date; construction sorts its input and rejects duplicate dates and
/// non-positive prices.
class PriceSeries {
public:
  PriceSeries() = default;
  PriceSeries(std::string asset_id, std::vector<PricePoint> observations);

  const std::string& asset_id() const noexcept { return asset_id_; }
  const std::vector<PricePoint>& observations() const noexcept { return observations_; }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }

private:
  std::string asset_id_;
  std::vector<PricePoint> observations_;
};

struct ReturnPoint {
  Date date;
  double value;  // log return, dimensionless (x annualization)
};

/// Log returns of one asset. Dates strictly increasing; length is one less
/// than the source price series.
class ReturnSeries {
public:
  ReturnSeries() = default;
  ReturnSeries(std::string asset_id, std::vector<ReturnPoint> observations);

  const std::string& asset_id() const noexcept { return asset_id_; }
  const std::vector<ReturnPoint>& observations() const noexcept { return observations_; }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }

  std::vector<double> values() const;
  std::vector<Date> dates() const;

  /// Observations with dates inside [range.start, range.end].
  ReturnSeries slice(const DateRange& range) const;

private:
  std::string asset_id_;
  std::vector<ReturnPoint> observations_;
};

/// r_t = ln(P_t / P_{t-1}) * annualization for each consecutive pair.
/// Throws InsufficientDataError when fewer than two prices are given.
ReturnSeries to_returns(const PriceSeries& prices, double annualization = 365.0);

enum class AlignPolicy {
  Intersect,       ///< keep only dates present in every series
  CryptoCalendar,  ///< keep the union (7-day) axis; absent days get return 0
};

/// Date-aligned return matrix across assets: one shared date axis, one
/// column per asset, every cell populated.
class AlignedPanel {
public:
  AlignedPanel() = default;
  AlignedPanel(std::vector<std::string> assets, std::vector<Date> dates,
               Eigen::MatrixXd returns);

  const std::vector<std::string>& assets() const noexcept { return assets_; }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const Eigen::MatrixXd& matrix() const noexcept { return returns_; }

  std::size_t rows() const noexcept { return dates_.size(); }
  std::size_t cols() const noexcept { return assets_.size(); }

  bool has_asset(const std::string& tag) const;
  std::size_t asset_index(const std::string& tag) const;  // throws DesignError
  std::vector<double> column(const std::string& tag) const;
  std::vector<double> column(std::size_t index) const;

  /// Rows with dates inside the closed range. Column set unchanged.
  AlignedPanel slice(const DateRange& range) const;

  /// Same axis and assets, new values (e.g. after filtering each column).
  AlignedPanel with_matrix(Eigen::MatrixXd values) const;

  /// Distinct calendar years present on the date axis, ascending.
  std::vector<int> years() const;

private:
  std::vector<std::string> assets_;
  std::vector<Date> dates_;
  Eigen::MatrixXd returns_;  // rows = dates, cols = assets
};

/// Build the shared-axis panel from per-asset return series.
/// Throws AlignmentError when fewer than two series are given, any series is
/// empty, or the intersect axis comes out empty.
AlignedPanel align_panel(std::span<const ReturnSeries> series,
                         AlignPolicy policy = AlignPolicy::Intersect);

/// Descriptive statistics. mean/sd/min/max are scaled x100 ("percent"
/// units); skewness and kurtosis are the adjusted Fisher-Pearson sample
/// estimators, kurtosis in the excess convention (normal => 0). A constant
/// series is flagged degenerate: sd = 0, skewness/kurtosis = NaN.
struct StatsSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  bool degenerate = false;
};

/// Throws InsufficientDataError when fewer than four observations.
StatsSummary describe(const ReturnSeries& returns);

/// Trailing arithmetic mean; output dated at each window end, length
/// n - window + 1. Throws when window < 1 or window > length.
ReturnSeries moving_average(const ReturnSeries& returns, std::size_t window = 50);

}  // namespace stabkit
