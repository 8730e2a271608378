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

#include "stabkit/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double local_cost(double a, double b) { return std::abs(a - b); }

// Sakoe-Chiba feasibility. The half-width is widened to |n-m| so the end
// cell stays reachable for unequal lengths.
inline bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m,
                    const std::optional<std::size_t>& band) {
  if (!band) return true;
  const std::size_t w = std::max<std::size_t>(*band, n > m ? n - m : m - n);
  const auto di = static_cast<std::ptrdiff_t>(i);
  const auto dj = static_cast<std::ptrdiff_t>(j);
  return static_cast<std::size_t>(di > dj ? di - dj : dj - di) <= w;
}

}  // namespace

std::string to_string(FilterState s) {
  return s == FilterState::Pre ? "pre" : "post";
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractError("pearson inputs differ in length: " + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw InsufficientDataError("pearson needs at least 2 observations");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateError("pearson undefined for constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const AlignedPanel& panel, const DateRange& period,
                                     std::string period_label, FilterState state) {
  const AlignedPanel slice = panel.slice(period);
  if (slice.cols() < 2) {
    throw DomainError("correlation matrix needs at least 2 assets");
  }
  if (slice.rows() < 2) {
    throw InsufficientDataError("correlation matrix needs at least 2 dates in period '" +
                                period_label + "'");
  }
  const std::size_t p = slice.cols();
  CorrelationMatrix out;
  out.assets = slice.assets();
  out.period = std::move(period_label);
  out.filter_state = state;
  out.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(p),
                                         static_cast<Eigen::Index>(p),
                                         std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<double>> cols(p);
  std::vector<bool> constant(p, false);
  for (std::size_t i = 0; i < p; ++i) {
    cols[i] = slice.column(i);
    constant[i] = std::all_of(cols[i].begin(), cols[i].end(),
                              [&](double v) { return v == cols[i].front(); });
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      if (constant[i] || constant[j]) {
        out.degenerate_pairs.emplace_back(i, j);
        continue;
      }
      const double r = (i == j) ? 1.0 : pearson(cols[i], cols[j]);
      out.values(ei, ej) = r;
      out.values(ej, ei) = r;
    }
  }
  return out;
}

DtwResult dtw(std::span<const double> x, std::span<const double> y,
              const DtwOptions& options) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n == 0 || m == 0) {
    throw InsufficientDataError("dtw of empty sequence");
  }

  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(m), kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, options.band)) continue;
      const double d = local_cost(x[i], y[j]);
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = g(0, ej - 1);
      } else if (j == 0) {
        best = g(ei - 1, 0);
      } else {
        best = std::min({g(ei - 1, ej - 1), g(ei - 1, ej), g(ei, ej - 1)});
      }
      g(ei, ej) = d + best;
    }
  }

  DtwResult result;
  result.distance = g(static_cast<Eigen::Index>(n) - 1, static_cast<Eigen::Index>(m) - 1);

  // Backtrack from (n-1, m-1); on ties prefer diagonal, then vertical, then
  // horizontal, which picks the shortest path among the optima.
  std::vector<std::pair<std::size_t, std::size_t>> rev;
  std::size_t i = n - 1, j = m - 1;
  rev.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = g(static_cast<Eigen::Index>(i) - 1, static_cast<Eigen::Index>(j) - 1);
      const double vert = g(static_cast<Eigen::Index>(i) - 1, static_cast<Eigen::Index>(j));
      const double horz = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j) - 1);
      if (diag <= vert && diag <= horz) {
        --i;
        --j;
      } else if (vert <= horz) {
        --i;
      } else {
        --j;
      }
    }
    rev.emplace_back(i, j);
  }
  result.path.assign(rev.rbegin(), rev.rend());
  if (options.keep_matrix) {
    result.cost_matrix = std::move(g);
  }
  return result;
}

double dtw_distance(std::span<const double> x, std::span<const double> y,
                    const DtwOptions& options) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n == 0 || m == 0) {
    throw InsufficientDataError("dtw of empty sequence");
  }
  std::vector<double> prev(m, kInf), cur(m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, options.band)) continue;
      const double d = local_cost(x[i], y[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = cur[j - 1];
      } else if (j == 0) {
        best = prev[0];
      } else {
        best = std::min({prev[j - 1], prev[j], cur[j - 1]});
      }
      cur[j] = d + best;
    }
    prev.swap(cur);
  }
  return prev[m - 1];
}

DtwMatrix dtw_matrix(const AlignedPanel& panel, std::span<const std::string> baseline_assets,
                     const DateRange& period, std::string period_label, FilterState state) {
  if (baseline_assets.size() < 2) {
    throw DomainError("dtw normalization needs at least 2 baseline assets");
  }
  const AlignedPanel slice = panel.slice(period);
  if (slice.rows() < 1) {
    throw InsufficientDataError("dtw matrix: no dates in period '" + period_label + "'");
  }
  for (const auto& tag : baseline_assets) {
    slice.asset_index(tag);  // throws DesignError when absent
  }

  const std::size_t p = slice.cols();
  std::vector<std::vector<double>> cols(p);
  for (std::size_t i = 0; i < p; ++i) cols[i] = slice.column(i);

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                              static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const double d = dtw_distance(cols[i], cols[j]);
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      raw(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }

  double dmax = 0.0;
  for (std::size_t a = 0; a < baseline_assets.size(); ++a) {
    for (std::size_t b = a + 1; b < baseline_assets.size(); ++b) {
      const auto ia = static_cast<Eigen::Index>(slice.asset_index(baseline_assets[a]));
      const auto ib = static_cast<Eigen::Index>(slice.asset_index(baseline_assets[b]));
      dmax = std::max(dmax, raw(ia, ib));
    }
  }
  if (dmax == 0.0) {
    throw NormalizationError("all baseline DTW distances are zero in period '" +
                             period_label + "'");
  }

  DtwMatrix out;
  out.assets = slice.assets();
  out.values = raw / dmax;
  out.baseline_max = dmax;
  out.period = std::move(period_label);
  out.filter_state = state;
  return out;
}

}  // namespace stabkit
