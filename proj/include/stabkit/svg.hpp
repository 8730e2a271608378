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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/spectral.hpp"
#include "stabkit/structural.hpp"

namespace stabkit {

/// Deliberately minimal, deterministic SVG plots (fixed canvas, no styling
/// ambition). Structure is machine-checkable through class attributes:
/// "series" for data polylines, "boundary" for crossing bounds, "path" for a
/// fluctuation process, "nyquist" for the frequency annotation, "link" for
/// alignment segments.

/// Log-log periodogram. Non-positive bins are skipped (log scale); the
/// Nyquist frequency is marked with a vertical line and a text annotation.
void write_psd_svg(const std::filesystem::path& file, const SpectrumDensity& spectrum,
                   const std::string& title);

/// Fluctuation process with its symmetric crossing band: exactly one
/// polyline class="path" and two polylines class="boundary" (+b and -b).
void write_cusum_svg(const std::filesystem::path& file, const CusumOutcome& outcome,
                     const std::string& title);

/// Two stacked series with one segment per warping-path step between them.
void write_dtw_alignment_svg(const std::filesystem::path& file, std::span<const double> x,
                             std::span<const double> y,
                             const std::vector<std::pair<std::size_t, std::size_t>>& path,
                             const std::string& x_label, const std::string& y_label,
                             const std::string& title);

}  // namespace stabkit
