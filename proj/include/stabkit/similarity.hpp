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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/series.hpp"

namespace stabkit {

enum class FilterState { Pre, Post };

std::string to_string(FilterState s);

/// Sample Pearson correlation. Requires equal lengths >= 2; throws
/// DegenerateError when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pairwise Pearson matrix over a period slice of the panel. Degenerate
/// (constant-column) pairs are flagged and stored as NaN, not fatal.
struct CorrelationMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd values;  // symmetric, unit diagonal, entries in [-1, 1]
  std::string period;
  FilterState filter_state = FilterState::Pre;
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs;
};

CorrelationMatrix correlation_matrix(const AlignedPanel& panel, const DateRange& period,
                                     std::string period_label, FilterState state);

/// Optional knobs for the DTW kernel. `band` is a Sakoe-Chiba window
/// half-width on |i - j| (off by default: the reproduction runs use only the
/// boundary / continuity / monotonicity constraints). `keep_matrix` retains
/// the full cumulative-cost matrix in the result.
struct DtwOptions {
  std::optional<std::size_t> band;
  bool keep_matrix = true;
};

/// Result of one DTW alignment. Path entries are 0-based (i, j) pairs from
/// (0,0) to (n-1,m-1); consecutive steps are in {(1,0),(0,1),(1,1)} and the
/// distance equals both the path cost sum and cost_matrix(n-1, m-1).
struct DtwResult {
  Eigen::MatrixXd cost_matrix;  // empty when keep_matrix is false
  std::vector<std::pair<std::size_t, std::size_t>> path;
  double distance = 0.0;
};

/// Dynamic time warping with local cost d(a, b) = |a - b|.
/// gamma(i,j) = d(x_i, y_j) + min(gamma(i-1,j), gamma(i,j-1), gamma(i-1,j-1));
/// backtracking tie-break prefers diagonal, then vertical (advance i), then
/// horizontal. Throws InsufficientDataError on an empty input.
DtwResult dtw(std::span<const double> x, std::span<const double> y,
              const DtwOptions& options = {});

/// Distance only; two-row rolling buffer, no path.
double dtw_distance(std::span<const double> x, std::span<const double> y,
                    const DtwOptions& options = {});

/// Pairwise DTW distances over a period slice, normalized by the maximum
/// distance among the baseline-asset pairs (D_max). The baseline pair that
/// attains D_max maps to exactly 1.
struct DtwMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd values;  // zero diagonal, symmetric, >= 0
  double baseline_max = 0.0;
  std::string period;
  FilterState filter_state = FilterState::Pre;
};

/// Requires baseline_assets to be a subset of the panel with >= 2 entries;
/// throws NormalizationError when D_max == 0.
DtwMatrix dtw_matrix(const AlignedPanel& panel, std::span<const std::string> baseline_assets,
                     const DateRange& period, std::string period_label, FilterState state);

}  // namespace stabkit
