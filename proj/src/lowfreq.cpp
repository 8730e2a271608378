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

#include "stabkit/lowfreq.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void run_r2r(const double* in, double* out, std::size_t n, fftw_r2r_kind kind) {
  double* buf = fftw_alloc_real(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = in[i];
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(n), buf, buf, kind, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i];
  fftw_free(buf);
}

}  // namespace

CosineCoefficients dct(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n == 0) {
    throw InsufficientDataError("dct of empty series");
  }
  CosineCoefficients c;
  c.values.resize(n);
  // REDFT10 computes 2 * sum_j x_j cos(pi (j+1/2) k / n); rescale rows to
  // the orthonormal convention.
  run_r2r(series.data(), c.values.data(), n, FFTW_REDFT10);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n)) / 2.0;
  const double sk = std::sqrt(2.0 / static_cast<double>(n)) / 2.0;
  c.values[0] *= s0;
  for (std::size_t k = 1; k < n; ++k) c.values[k] *= sk;
  return c;
}

std::vector<double> idct(const CosineCoefficients& coefficients) {
  const std::size_t n = coefficients.basis_order();
  if (n == 0) {
    throw InsufficientDataError("idct of empty coefficients");
  }
  // REDFT01 computes a_0 + 2 * sum_{k>=1} a_k cos(pi (j+1/2) k / n);
  // pre-scale so the result is the exact orthonormal inverse.
  std::vector<double> pre(n);
  pre[0] = coefficients.values[0] * std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n)) / 2.0;
  for (std::size_t k = 1; k < n; ++k) pre[k] = coefficients.values[k] * sk;
  std::vector<double> out(n);
  run_r2r(pre.data(), out.data(), n, FFTW_REDFT01);
  return out;
}

std::size_t truncation_order(std::size_t n) {
  if (n < 10) {
    throw DomainError("truncation order rule needs n >= 10, got " + std::to_string(n));
  }
  return n / 10 + 3;
}

FilterSpec filter_spec(std::size_t n, std::size_t q) {
  if (q < 1 || q > n) {
    throw DomainError("truncation order q=" + std::to_string(q) +
                      " out of range [1, " + std::to_string(n) + "]");
  }
  FilterSpec f;
  f.n = n;
  f.q = q;
  f.cutoff_period = 2.0 * static_cast<double>(n) / static_cast<double>(q);
  f.cutoff_frequency = static_cast<double>(q) / (2.0 * static_cast<double>(n));
  return f;
}

std::vector<double> mw_project(std::span<const double> series, std::size_t q) {
  const std::size_t n = series.size();
  if (q < 1 || q > n) {
    throw DomainError("truncation order q=" + std::to_string(q) +
                      " out of range [1, " + std::to_string(n) + "]");
  }
  auto c = dct(series);
  for (std::size_t k = q; k < n; ++k) c.values[k] = 0.0;
  return idct(c);
}

}  // namespace stabkit
