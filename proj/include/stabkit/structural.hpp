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

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stabkit/series.hpp"

namespace stabkit {

/// Regressor tags every stability regression conditions on. A target that is
/// itself one of these enters through its own lag only (no duplicate column).
const std::vector<std::string>& default_key_assets();

/// Lagged-return regression data: response z_t and design row
/// X_t = [1, target_{t-1}, key_1,{t-1}, ..., key_m,{t-1}].
///
/// The first panel date is consumed by the lag, so a panel of T dates yields
/// T-1 rows. A time-varying alternative (per-date coefficients plus extra
/// regressors Z_t'gamma) is deliberately not modeled; every fit in this
/// library estimates the fixed-coefficient equation.
struct RegressionDesign {
  std::string target;
  std::vector<std::string> regressor_names;  ///< "const", "<tag>_lag1", ...
  Eigen::MatrixXd X;                         ///< rows() x regressor count
  Eigen::VectorXd y;                         ///< response, one entry per row
  std::vector<Date> dates;                   ///< date of each response row

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }
};

/// Builds the lagged design for `target` over the panel's date axis.
///
/// `key_assets` defaults to default_key_assets() when empty. Throws
/// DesignError when the panel lacks the target or a key asset and
/// InsufficientDataError when fewer than two dates are available. Row-count
/// adequacy relative to the regressor count is the caller's concern; an
/// underdetermined design surfaces later as a rank failure in ols_fit.
RegressionDesign build_design(const AlignedPanel& panel, const std::string& target,
                              std::span<const std::string> key_assets = {});

/// Ordinary least squares result.
struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  double sigma_hat = 0.0;  ///< sqrt(RSS / (rows - k))
  std::size_t k = 0;       ///< regressor count
};

/// Fits the design by least squares. Throws SingularDesignError when X is
/// rank deficient (including rows <= k, where sigma_hat is undefined).
RegressionFit ols_fit(const RegressionDesign& design);

enum class CusumKind { Ols, Recursive };

std::string to_string(CusumKind kind);

/// Empirical fluctuation process sampled on a tau grid over [0, 1].
struct CusumPath {
  std::vector<double> taus;    ///< j / n for j = 0..n
  std::vector<double> values;  ///< W_n(tau_j)
  CusumKind kind = CusumKind::Ols;
};

/// Cumulative-sum process of the OLS residuals,
/// W_n(j/n) = (1 / (sigma_hat sqrt(n))) * sum_{i<=j} e_i.
///
/// The intercept forces the residual sum to zero, so the path starts and ends
/// at exactly 0. A fit with all-zero residuals yields the identically zero
/// path; a zero sigma_hat with nonzero residuals is a DegenerateError.
CusumPath ols_cusum(const RegressionFit& fit);

/// Standardized one-step-ahead forecast errors
/// e_t = (y_t - X_t' b_{t-1}) / sqrt(1 + X_t' (sum_{i<t} X_i X_i')^{-1} X_t),
/// defined from the first row whose leading moment matrix is invertible.
struct RecursiveResiduals {
  std::vector<double> values;
  std::size_t start_row = 0;  ///< 1-based row of the first residual (k+1 unless shifted)
  bool start_shifted = false; ///< true when an early singular moment matrix moved the start
};

/// Computes recursive residuals with a rank-one Cholesky update per row.
/// Throws InsufficientDataError when rows < k + 1 and SingularDesignError
/// when no invertible starting moment matrix leaves at least one residual.
RecursiveResiduals recursive_residuals(const RegressionDesign& design);

/// Scaled partial sums of the recursive residuals on the grid j/m,
/// m = residual count; W(0) = 0. Same zero/degenerate convention as
/// ols_cusum. `sigma_hat` is conventionally the sample standard deviation of
/// the residuals themselves (see sample_sd).
CusumPath rec_cusum(const RecursiveResiduals& residuals, double sigma_hat);

/// Crossing-boundary families for the fluctuation processes.
enum class BoundaryKind {
  OlsConst,  ///< b(tau) = nu
  OlsSd,     ///< b(tau) = 2 nu sqrt(tau (1 - tau))
  RecLinear, ///< b(tau) = lambda (1 + 2 tau); printed variant lambda (2 tau - 1)
  RecSd,     ///< b(tau) = 2 nu sqrt(tau)
};

/// Parses "ols-const" | "ols-sd" | "rec-linear" | "rec-sd"; ConfigError otherwise.
BoundaryKind boundary_kind_from_string(const std::string& name);

std::string to_string(BoundaryKind kind);

/// Boundary family plus its level parameter (nu for the ols/sd kinds, lambda
/// for rec-linear). `printed_rec_linear` switches rec-linear to the form
/// lambda (2 tau - 1), which is non-positive for tau <= 1/2 and kept only for
/// side-by-side comparison runs.
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::OlsConst;
  double level = 1.358;
  bool printed_rec_linear = false;
};

struct Boundary {
  BoundarySpec spec;
  std::vector<double> taus;
  std::vector<double> values;
};

/// Evaluates the boundary pointwise on `taus`. Throws DomainError when the
/// level parameter is not positive or a tau lies outside [0, 1].
Boundary make_boundary(const BoundarySpec& spec, std::span<const double> taus);

/// Verdict of a fluctuation process against a boundary.
struct CusumOutcome {
  CusumPath path;
  Boundary boundary;
  double sup_statistic = 0.0;                ///< max_j |W(tau_j)|
  bool crossed = false;                      ///< exists tau with |W(tau)| > b(tau)
  std::optional<double> first_crossing_tau;  ///< smallest such grid tau
};

/// Compares path and boundary on their shared grid. Throws ContractError
/// when the tau grids differ.
CusumOutcome cusum_test(CusumPath path, Boundary boundary);

/// Kolmogorov distribution function
/// P(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2),
/// summed until the next term falls below 1e-12. Nondecreasing, maps
/// [0, inf) into [0, 1), P(0) = 0. Throws DomainError for x < 0.
double kolmogorov_cdf(double x);

/// Level parameter nu with kolmogorov_cdf(nu) = confidence, found by
/// bracketing bisection to an interval of 1e-9. Requires 0 < confidence < 1.
double critical_value(double confidence);

/// Bessel-corrected sample standard deviation; needs at least 2 values.
double sample_sd(std::span<const double> xs);

}  // namespace stabkit
