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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace stabkit {

/// Complex DFT bins Q_k for k = 1..n, stored at coefficients[k-1]:
///
///   Q_k = sum_{j=1..n} r_j exp(-i 2 pi j k / n)
///
/// Note the 1-based sum: the DC bin sits at k = n, and for real input
/// Q_{n-k} = conj(Q_k) (indices mod n).
struct ComplexSpectrum {
  std::vector<std::complex<double>> coefficients;

  std::size_t size() const noexcept { return coefficients.size(); }
  /// Bin by 1-based index k (1..n).
  std::complex<double> bin(std::size_t k) const { return coefficients.at(k - 1); }
};

/// Exact DFT of a real sequence in the convention above. FFT-backed for any
/// length, including non powers of two. Throws InsufficientDataError on
/// empty input.
ComplexSpectrum dft(std::span<const double> series);

/// Periodogram power spectral density on the frequency grid f_k = k/(n dt),
/// k = 1..n:
///
///   I(f_k) = (2 dt^2 / n) |Q_k|^2
///
/// Full grid retained; the first one_sided_bins() entries are what plots
/// use. nyquist = 1/(2 dt).
struct SpectrumDensity {
  std::vector<double> frequencies;
  std::vector<double> density;
  double sampling_interval = 0.0;
  double nyquist = 0.0;

  std::size_t size() const noexcept { return frequencies.size(); }
  std::size_t one_sided_bins() const noexcept { return frequencies.size() / 2; }
};

/// Throws DomainError when sampling_interval <= 0, InsufficientDataError
/// when the series has fewer than 2 points.
SpectrumDensity psd(std::span<const double> series, double sampling_interval = 100.0);

/// 1/(2 dt), the highest frequency representable at sampling interval dt.
double nyquist_frequency(double sampling_interval);

}  // namespace stabkit
