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

#include "stabkit/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "stabkit/errors.hpp"

namespace stabkit {

PriceSeries::PriceSeries(std::string asset_id, std::vector<PricePoint> observations)
    : asset_id_(std::move(asset_id)), observations_(std::move(observations)) {
  std::stable_sort(observations_.begin(), observations_.end(),
                   [](const PricePoint& a, const PricePoint& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    if (observations_[i].price <= 0.0) {
      throw DomainError("non-positive price " + std::to_string(observations_[i].price) +
                        " at " + observations_[i].date.iso() + " for asset '" + asset_id_ + "'");
    }
    if (i > 0 && observations_[i].date == observations_[i - 1].date) {
      throw IntegrityError("duplicate date " + observations_[i].date.iso() +
                           " for asset '" + asset_id_ + "'");
    }
  }
}

ReturnSeries::ReturnSeries(std::string asset_id, std::vector<ReturnPoint> observations)
    : asset_id_(std::move(asset_id)), observations_(std::move(observations)) {
  std::stable_sort(observations_.begin(), observations_.end(),
                   [](const ReturnPoint& a, const ReturnPoint& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < observations_.size(); ++i) {
    if (observations_[i].date == observations_[i - 1].date) {
      throw IntegrityError("duplicate date " + observations_[i].date.iso() +
                           " for asset '" + asset_id_ + "'");
    }
  }
}

std::vector<double> ReturnSeries::values() const {
  std::vector<double> v;
  v.reserve(observations_.size());
  for (const auto& o : observations_) v.push_back(o.value);
  return v;
}

std::vector<Date> ReturnSeries::dates() const {
  std::vector<Date> v;
  v.reserve(observations_.size());
  for (const auto& o : observations_) v.push_back(o.date);
  return v;
}

ReturnSeries ReturnSeries::slice(const DateRange& range) const {
  std::vector<ReturnPoint> kept;
  for (const auto& o : observations_) {
    if (range.contains(o.date)) kept.push_back(o);
  }
  return ReturnSeries(asset_id_, std::move(kept));
}

ReturnSeries to_returns(const PriceSeries& prices, double annualization) {
  if (prices.size() < 2) {
    throw InsufficientDataError("need at least 2 prices to compute returns for asset '" +
                                prices.asset_id() + "', got " + std::to_string(prices.size()));
  }
  const auto& obs = prices.observations();
  std::vector<ReturnPoint> out;
  out.reserve(obs.size() - 1);
  for (std::size_t i = 1; i < obs.size(); ++i) {
    out.push_back({obs[i].date, std::log(obs[i].price / obs[i - 1].price) * annualization});
  }
  return ReturnSeries(prices.asset_id(), std::move(out));
}

AlignedPanel::AlignedPanel(std::vector<std::string> assets, std::vector<Date> dates,
                           Eigen::MatrixXd returns)
    : assets_(std::move(assets)), dates_(std::move(dates)), returns_(std::move(returns)) {
  if (returns_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
      returns_.cols() != static_cast<Eigen::Index>(assets_.size())) {
    throw ContractError("panel matrix shape does not match axes");
  }
}

bool AlignedPanel::has_asset(const std::string& tag) const {
  return std::find(assets_.begin(), assets_.end(), tag) != assets_.end();
}

std::size_t AlignedPanel::asset_index(const std::string& tag) const {
  auto it = std::find(assets_.begin(), assets_.end(), tag);
  if (it == assets_.end()) {
    throw DesignError("asset '" + tag + "' not present in panel");
  }
  return static_cast<std::size_t>(it - assets_.begin());
}

std::vector<double> AlignedPanel::column(const std::string& tag) const {
  return column(asset_index(tag));
}

std::vector<double> AlignedPanel::column(std::size_t index) const {
  const auto col = returns_.col(static_cast<Eigen::Index>(index));
  return std::vector<double>(col.begin(), col.end());
}

AlignedPanel AlignedPanel::slice(const DateRange& range) const {
  std::vector<Date> dates;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < dates_.size(); ++i) {
    if (range.contains(dates_[i])) {
      dates.push_back(dates_[i]);
      rows.push_back(static_cast<Eigen::Index>(i));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), returns_.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r) = returns_.row(rows[r]);
  return AlignedPanel(assets_, std::move(dates), std::move(m));
}

AlignedPanel AlignedPanel::with_matrix(Eigen::MatrixXd values) const {
  return AlignedPanel(assets_, dates_, std::move(values));
}

std::vector<int> AlignedPanel::years() const {
  std::vector<int> out;
  for (const auto& d : dates_) {
    if (out.empty() || out.back() != d.year()) out.push_back(d.year());
  }
  // Axis is sorted, so duplicates can only be adjacent.
  return out;
}

AlignedPanel align_panel(std::span<const ReturnSeries> series, AlignPolicy policy) {
  if (series.size() < 2) {
    throw AlignmentError("alignment needs at least 2 series, got " +
                         std::to_string(series.size()));
  }
  for (const auto& s : series) {
    if (s.empty()) {
      throw AlignmentError("cannot align empty series '" + s.asset_id() + "'");
    }
  }

  std::vector<Date> axis;
  if (policy == AlignPolicy::Intersect) {
    std::set<Date> common;
    for (const auto& o : series[0].observations()) common.insert(o.date);
    for (std::size_t i = 1; i < series.size(); ++i) {
      std::set<Date> next;
      for (const auto& o : series[i].observations()) {
        if (common.count(o.date)) next.insert(o.date);
      }
      common.swap(next);
    }
    if (common.empty()) {
      throw AlignmentError("empty date intersection across series");
    }
    axis.assign(common.begin(), common.end());
  } else {
    std::set<Date> all;
    for (const auto& s : series) {
      for (const auto& o : s.observations()) all.insert(o.date);
    }
    axis.assign(all.begin(), all.end());
  }

  Eigen::MatrixXd m(static_cast<Eigen::Index>(axis.size()),
                    static_cast<Eigen::Index>(series.size()));
  m.setZero();  // CryptoCalendar: absent days carry return 0 (price carried forward)
  std::vector<std::string> assets;
  assets.reserve(series.size());
  for (std::size_t c = 0; c < series.size(); ++c) {
    assets.push_back(series[c].asset_id());
    std::map<Date, double> by_date;
    for (const auto& o : series[c].observations()) by_date.emplace(o.date, o.value);
    for (std::size_t r = 0; r < axis.size(); ++r) {
      auto it = by_date.find(axis[r]);
      if (it != by_date.end()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = it->second;
      }
    }
  }
  return AlignedPanel(std::move(assets), std::move(axis), std::move(m));
}

StatsSummary describe(const ReturnSeries& returns) {
  const std::size_t n = returns.size();
  if (n < 4) {
    throw InsufficientDataError("describe needs at least 4 observations, got " +
                                std::to_string(n));
  }
  const auto v = returns.values();
  const double dn = static_cast<double>(n);

  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= dn;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double lo = v[0], hi = v[0];
  for (double x : v) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;

  StatsSummary s;
  s.n = n;
  s.mean = mean * 100.0;
  s.sd = std::sqrt(m2 * dn / (dn - 1.0)) * 100.0;
  s.min = lo * 100.0;
  s.max = hi * 100.0;
  if (m2 <= 0.0) {
    s.degenerate = true;
    s.sd = 0.0;
    s.skewness = std::numeric_limits<double>::quiet_NaN();
    s.kurtosis = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  // Adjusted Fisher-Pearson estimators.
  const double g1 = m3 / std::pow(m2, 1.5);
  const double g2 = m4 / (m2 * m2) - 3.0;
  s.skewness = g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
  s.kurtosis = ((dn + 1.0) * g2 + 6.0) * (dn - 1.0) / ((dn - 2.0) * (dn - 3.0));
  return s;
}

ReturnSeries moving_average(const ReturnSeries& returns, std::size_t window) {
  if (window < 1) {
    throw DomainError("moving average window must be >= 1");
  }
  if (window > returns.size()) {
    throw InsufficientDataError("moving average window " + std::to_string(window) +
                                " exceeds series length " + std::to_string(returns.size()));
  }
  const auto& obs = returns.observations();
  std::vector<ReturnPoint> out;
  out.reserve(obs.size() - window + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc += obs[i].value;
    if (i + 1 >= window) {
      out.push_back({obs[i].date, acc / static_cast<double>(window)});
      acc -= obs[i + 1 - window].value;
    }
  }
  return ReturnSeries(returns.asset_id(), std::move(out));
}

}  // namespace stabkit
