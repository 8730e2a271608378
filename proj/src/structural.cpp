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

#include "stabkit/structural.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

bool all_zero(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) return false;
  }
  return true;
}

std::vector<double> tau_grid(std::size_t n) {
  std::vector<double> taus(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    taus[j] = static_cast<double>(j) / static_cast<double>(n);
  }
  return taus;
}

// Shared partial-sum scaling for both fluctuation processes. A zero scale is
// tolerated only when every summand is zero (the process is then identically
// zero by convention); otherwise the path is undefined.
CusumPath scaled_partial_sums(const Eigen::VectorXd& residuals, double sigma_hat,
                              CusumKind kind) {
  const auto n = static_cast<std::size_t>(residuals.size());
  if (n < 2) {
    throw InsufficientDataError("fluctuation process needs at least 2 residuals");
  }
  if (sigma_hat < 0.0 || !std::isfinite(sigma_hat)) {
    throw DomainError("residual standard deviation must be finite and >= 0");
  }
  CusumPath path;
  path.kind = kind;
  path.taus = tau_grid(n);
  path.values.assign(n + 1, 0.0);
  if (sigma_hat == 0.0) {
    if (!all_zero(residuals)) {
      throw DegenerateError("fluctuation process undefined: sigma_hat = 0 with nonzero residuals");
    }
    return path;
  }
  const double scale = 1.0 / (sigma_hat * std::sqrt(static_cast<double>(n)));
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    acc += residuals[static_cast<Eigen::Index>(j) - 1];
    path.values[j] = scale * acc;
  }
  return path;
}

}  // namespace

const std::vector<std::string>& default_key_assets() {
  static const std::vector<std::string> keys = {"JPY", "EUR", "GOLD", "SP500", "MSCI"};
  return keys;
}

RegressionDesign build_design(const AlignedPanel& panel, const std::string& target,
                              std::span<const std::string> key_assets) {
  std::vector<std::string> keys(key_assets.begin(), key_assets.end());
  if (keys.empty()) keys = default_key_assets();

  if (!panel.has_asset(target)) {
    throw DesignError("design target '" + target + "' not in panel");
  }
  for (const auto& tag : keys) {
    if (!panel.has_asset(tag)) {
      throw DesignError("design regressor '" + tag + "' not in panel");
    }
  }
  const std::size_t t_count = panel.rows();
  if (t_count < 2) {
    throw InsufficientDataError("lagged design needs at least 2 dates");
  }

  std::vector<std::size_t> lag_cols;
  std::vector<std::string> names;
  names.push_back("const");
  lag_cols.push_back(panel.asset_index(target));
  names.push_back(target + "_lag1");
  for (const auto& tag : keys) {
    if (tag == target) continue;  // own lag already present
    lag_cols.push_back(panel.asset_index(tag));
    names.push_back(tag + "_lag1");
  }

  const std::size_t rows = t_count - 1;
  const std::size_t cols = 1 + lag_cols.size();
  RegressionDesign design;
  design.target = target;
  design.regressor_names = std::move(names);
  design.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  design.y.resize(static_cast<Eigen::Index>(rows));
  design.dates.reserve(rows);

  const auto target_col = static_cast<Eigen::Index>(panel.asset_index(target));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto er = static_cast<Eigen::Index>(r);
    design.y[er] = panel.matrix()(er + 1, target_col);
    design.X(er, 0) = 1.0;
    for (std::size_t c = 0; c < lag_cols.size(); ++c) {
      design.X(er, static_cast<Eigen::Index>(c) + 1) =
          panel.matrix()(er, static_cast<Eigen::Index>(lag_cols[c]));
    }
    design.dates.push_back(panel.dates()[r + 1]);
  }
  return design;
}

RegressionFit ols_fit(const RegressionDesign& design) {
  const Eigen::Index n = design.X.rows();
  const Eigen::Index k = design.X.cols();
  if (n == 0 || k == 0) {
    throw InsufficientDataError("empty regression design");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < k || n <= k) {
    throw SingularDesignError("design matrix is rank deficient (" +
                              std::to_string(n) + " rows, " + std::to_string(k) +
                              " regressors, rank " + std::to_string(qr.rank()) + ")");
  }
  RegressionFit fit;
  fit.k = static_cast<std::size_t>(k);
  fit.coefficients = qr.solve(design.y);
  fit.residuals = design.y - design.X * fit.coefficients;
  double rss = fit.residuals.squaredNorm();
  // A response explained to machine precision is an exact fit: what is left
  // over is rounding noise, not an error estimate. Snap it to zero so the
  // downstream residual processes do not amplify noise-over-noise ratios.
  if (rss <= 1e-24 * design.y.squaredNorm()) {
    fit.residuals.setZero();
    rss = 0.0;
  }
  fit.sigma_hat = std::sqrt(rss / static_cast<double>(n - k));
  return fit;
}

std::string to_string(CusumKind kind) {
  return kind == CusumKind::Ols ? "ols" : "recursive";
}

CusumPath ols_cusum(const RegressionFit& fit) {
  CusumPath path = scaled_partial_sums(fit.residuals, fit.sigma_hat, CusumKind::Ols);
  // The residual sum is zero up to rounding whenever an intercept is present;
  // pin the bridge endpoint so downstream checks can compare against 0 exactly.
  if (std::abs(path.values.back()) < 1e-8) {
    path.values.back() = 0.0;
  }
  return path;
}

RecursiveResiduals recursive_residuals(const RegressionDesign& design) {
  const auto n = static_cast<std::size_t>(design.X.rows());
  const auto k = static_cast<std::size_t>(design.X.cols());
  if (n < k + 1) {
    throw InsufficientDataError("recursive residuals need at least k+1 = " +
                                std::to_string(k + 1) + " rows, have " + std::to_string(n));
  }

  // Find the shortest leading block with an invertible moment matrix. The
  // nominal start is after k rows; collinear early rows shift it forward.
  std::size_t head = k;
  Eigen::MatrixXd moment;
  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  while (true) {
    if (head >= n) {
      throw SingularDesignError("no invertible starting moment matrix leaves a residual");
    }
    const auto eh = static_cast<Eigen::Index>(head);
    moment = design.X.topRows(eh).transpose() * design.X.topRows(eh);
    lu.compute(moment);
    if (lu.isInvertible()) break;
    ++head;
  }

  RecursiveResiduals out;
  out.start_row = head + 1;
  out.start_shifted = head != k;
  out.values.reserve(n - head);

  Eigen::LLT<Eigen::MatrixXd> llt(moment);
  if (llt.info() != Eigen::Success) {
    throw SingularDesignError("moment matrix is not positive definite");
  }
  Eigen::VectorXd xty = design.X.topRows(static_cast<Eigen::Index>(head)).transpose() *
                        design.y.head(static_cast<Eigen::Index>(head));

  for (std::size_t t = head; t < n; ++t) {
    const auto et = static_cast<Eigen::Index>(t);
    const Eigen::VectorXd x = design.X.row(et).transpose();
    const Eigen::VectorXd beta = llt.solve(xty);
    const double f = 1.0 + x.dot(llt.solve(x));
    out.values.push_back((design.y[et] - x.dot(beta)) / std::sqrt(f));
    llt.rankUpdate(x, 1.0);
    xty += x * design.y[et];
  }
  return out;
}

CusumPath rec_cusum(const RecursiveResiduals& residuals, double sigma_hat) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(residuals.values.size()));
  for (std::size_t i = 0; i < residuals.values.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = residuals.values[i];
  }
  return scaled_partial_sums(v, sigma_hat, CusumKind::Recursive);
}

BoundaryKind boundary_kind_from_string(const std::string& name) {
  if (name == "ols-const") return BoundaryKind::OlsConst;
  if (name == "ols-sd") return BoundaryKind::OlsSd;
  if (name == "rec-linear") return BoundaryKind::RecLinear;
  if (name == "rec-sd") return BoundaryKind::RecSd;
  throw ConfigError("unknown boundary kind '" + name + "'");
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::OlsConst: return "ols-const";
    case BoundaryKind::OlsSd: return "ols-sd";
    case BoundaryKind::RecLinear: return "rec-linear";
    case BoundaryKind::RecSd: return "rec-sd";
  }
  throw ConfigError("unknown boundary kind");
}

Boundary make_boundary(const BoundarySpec& spec, std::span<const double> taus) {
  if (!(spec.level > 0.0) || !std::isfinite(spec.level)) {
    throw DomainError("boundary level parameter must be positive");
  }
  Boundary boundary;
  boundary.spec = spec;
  boundary.taus.assign(taus.begin(), taus.end());
  boundary.values.reserve(taus.size());
  for (const double tau : taus) {
    if (tau < 0.0 || tau > 1.0) {
      throw DomainError("boundary tau outside [0, 1]");
    }
    double b = 0.0;
    switch (spec.kind) {
      case BoundaryKind::OlsConst:
        b = spec.level;
        break;
      case BoundaryKind::OlsSd:
        b = 2.0 * spec.level * std::sqrt(tau * (1.0 - tau));
        break;
      case BoundaryKind::RecLinear:
        b = spec.printed_rec_linear ? spec.level * (2.0 * tau - 1.0)
                                    : spec.level * (1.0 + 2.0 * tau);
        break;
      case BoundaryKind::RecSd:
        b = 2.0 * spec.level * std::sqrt(tau);
        break;
    }
    boundary.values.push_back(b);
  }
  return boundary;
}

CusumOutcome cusum_test(CusumPath path, Boundary boundary) {
  if (path.taus.size() != boundary.taus.size() ||
      !std::equal(path.taus.begin(), path.taus.end(), boundary.taus.begin())) {
    throw ContractError("path and boundary tau grids differ");
  }
  CusumOutcome outcome;
  outcome.sup_statistic = 0.0;
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    const double w = std::abs(path.values[j]);
    outcome.sup_statistic = std::max(outcome.sup_statistic, w);
    if (!outcome.crossed && w > boundary.values[j]) {
      outcome.crossed = true;
      outcome.first_crossing_tau = path.taus[j];
    }
  }
  outcome.path = std::move(path);
  outcome.boundary = std::move(boundary);
  return outcome;
}

double kolmogorov_cdf(double x) {
  if (x < 0.0 || !std::isfinite(x)) {
    throw DomainError("kolmogorov_cdf requires x >= 0");
  }
  if (x == 0.0) return 0.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 100000; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) * x * x);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  const double p = 1.0 - 2.0 * sum;
  // Below twice the term cutoff the alternating sum is dominated by its own
  // truncation error; report a clean 0 there so the CDF stays nondecreasing.
  if (p < 4e-12) return 0.0;
  // The distribution has unbounded support, so the CDF is strictly below 1.
  return std::min(p, std::nextafter(1.0, 0.0));
}

double critical_value(double confidence) {
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw DomainError("confidence must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 4.0;
  while (kolmogorov_cdf(hi) < confidence) hi *= 2.0;  // cdf(4) ~ 1, but stay safe
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < confidence) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) {
    throw InsufficientDataError("sample standard deviation needs at least 2 values");
  }
  double mean = 0.0;
  for (const double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double v : xs) {
    const double d = v - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace stabkit
