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

#include <cstddef>
#include <span>
#include <vector>

namespace stabkit {

/// Orthonormal type-II cosine coefficients of a series, 1-based like the
/// source notation: values[k-1] holds coefficient k, k = 1..n, with k = 1
/// the DC term sqrt(1/n) * sum(y).
struct CosineCoefficients {
  std::vector<double> values;
  std::size_t basis_order() const noexcept { return values.size(); }
};

/// Orthonormal DCT-II and its exact inverse; idct(dct(x)) == x to 1e-10.
CosineCoefficients dct(std::span<const double> series);
std::vector<double> idct(const CosineCoefficients& coefficients);

/// Truncation-order rule q = floor(n/10) + 3. Requires n >= 10.
std::size_t truncation_order(std::size_t n);

/// Cutoff bookkeeping for a truncation at order q out of n:
/// period T = 2n/q observations, frequency f = q/(2n); T * f == 1.
struct FilterSpec {
  std::size_t n = 0;
  std::size_t q = 0;
  double cutoff_period = 0.0;
  double cutoff_frequency = 0.0;
};

/// Requires 1 <= q <= n.
FilterSpec filter_spec(std::size_t n, std::size_t q);

/// Low-frequency projection: keep cosine coefficients 1..q, zero the rest,
/// transform back. Output length equals input length. An orthogonal
/// projection, so idempotent, linear, energy-contracting and (because the
/// DC vector is always kept) mean preserving.
std::vector<double> mw_project(std::span<const double> series, std::size_t q);

}  // namespace stabkit
