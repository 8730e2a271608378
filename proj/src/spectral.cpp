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

#include "stabkit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

// FFTW plan creation is not thread safe; execution of a created plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Standard DFT S_k = sum_{j=0..n-1} x_j exp(-i 2 pi j k / n), k = 0..n-1.
std::vector<std::complex<double>> standard_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  fftw_complex* buf = fftw_alloc_complex(n);
  for (std::size_t j = 0; j < n; ++j) {
    buf[j][0] = x[j];
    buf[j][1] = 0.0;
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  for (std::size_t k = 0; k < n; ++k) out[k] = {buf[k][0], buf[k][1]};
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

}  // namespace

ComplexSpectrum dft(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n == 0) {
    throw InsufficientDataError("dft of empty series");
  }
  const auto s = standard_dft(series);

  // The 1-based sum shifts each standard bin by a unit phase and moves the
  // DC bin from k=0 to k=n: Q_k = exp(-i 2 pi k / n) S_{k mod n}.
  ComplexSpectrum spec;
  spec.coefficients.resize(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double phi = -step * static_cast<double>(k);
    const std::complex<double> phase{std::cos(phi), std::sin(phi)};
    spec.coefficients[k - 1] = phase * s[k % n];
  }
  return spec;
}

SpectrumDensity psd(std::span<const double> series, double sampling_interval) {
  if (sampling_interval <= 0.0) {
    throw DomainError("sampling interval must be positive, got " +
                      std::to_string(sampling_interval));
  }
  const std::size_t n = series.size();
  if (n < 2) {
    throw InsufficientDataError("psd needs at least 2 points, got " + std::to_string(n));
  }
  const auto spec = dft(series);

  SpectrumDensity out;
  out.sampling_interval = sampling_interval;
  out.nyquist = nyquist_frequency(sampling_interval);
  out.frequencies.resize(n);
  out.density.resize(n);
  const double scale = 2.0 * sampling_interval * sampling_interval / static_cast<double>(n);
  const double base = 1.0 / (static_cast<double>(n) * sampling_interval);
  for (std::size_t k = 1; k <= n; ++k) {
    out.frequencies[k - 1] = base * static_cast<double>(k);
    out.density[k - 1] = scale * std::norm(spec.coefficients[k - 1]);
  }
  return out;
}

double nyquist_frequency(double sampling_interval) {
  if (sampling_interval <= 0.0) {
    throw DomainError("sampling interval must be positive");
  }
  return 1.0 / (2.0 * sampling_interval);
}

}  // namespace stabkit
