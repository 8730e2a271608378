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

#include "stabkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stabkit/csv.hpp"
#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Affine map from a data interval onto the drawable pixel band.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;

  double map(double v) const {
    const double t = hi == lo ? 0.5 : (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

Axis x_axis(double lo, double hi) { return Axis{lo, hi, kMargin, kWidth - kMargin}; }
Axis y_axis(double lo, double hi) { return Axis{lo, hi, kHeight - kMargin, kMargin}; }

void pad(double& lo, double& hi) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
    return;
  }
  const double w = hi - lo;
  lo -= 0.05 * w;
  hi += 0.05 * w;
}

class Canvas {
public:
  explicit Canvas(std::string root_attrs) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
         << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
         << "\"" << (root_attrs.empty() ? "" : " " + root_attrs) << ">\n";
    out_ << "  <rect class=\"frame\" x=\"" << px(kMargin) << "\" y=\"" << px(kMargin)
         << "\" width=\"" << px(kWidth - 2 * kMargin) << "\" height=\""
         << px(kHeight - 2 * kMargin)
         << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }

  void title(const std::string& text) {
    out_ << "  <text class=\"title\" x=\"" << px(kWidth / 2) << "\" y=\"" << px(kMargin / 2)
         << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">" << text
         << "</text>\n";
  }

  void polyline(const std::string& cls, const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, const std::string& dash = "") {
    out_ << "  <polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << stroke
         << "\" stroke-width=\"1\"";
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
    out_ << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ << " ";
      out_ << px(pts[i].first) << "," << px(pts[i].second);
    }
    out_ << "\"/>\n";
  }

  void line(const std::string& cls, double x1, double y1, double x2, double y2,
            const std::string& stroke, const std::string& extra_attrs = "") {
    out_ << "  <line class=\"" << cls << "\" x1=\"" << px(x1) << "\" y1=\"" << px(y1)
         << "\" x2=\"" << px(x2) << "\" y2=\"" << px(y2) << "\" stroke=\"" << stroke
         << "\" stroke-width=\"1\"" << (extra_attrs.empty() ? "" : " " + extra_attrs)
         << "/>\n";
  }

  void text(const std::string& cls, double x, double y, const std::string& body,
            const std::string& anchor = "middle") {
    out_ << "  <text class=\"" << cls << "\" x=\"" << px(x) << "\" y=\"" << px(y)
         << "\" text-anchor=\"" << anchor
         << "\" font-family=\"monospace\" font-size=\"11\">" << body << "</text>\n";
  }

  void write_to(const std::filesystem::path& file) {
    out_ << "</svg>\n";
    std::ofstream f(file, std::ios::binary);
    if (!f) throw ConfigError("cannot write plot file '" + file.string() + "'");
    f << out_.str();
  }

private:
  std::ostringstream out_;
};

std::string exp_label(int e) { return "1e" + std::to_string(e); }

void log_ticks(Canvas& canvas, const Axis& axis, bool horizontal) {
  const int first = static_cast<int>(std::ceil(std::min(axis.lo, axis.hi)));
  const int last = static_cast<int>(std::floor(std::max(axis.lo, axis.hi)));
  for (int e = first; e <= last; ++e) {
    const double p = axis.map(static_cast<double>(e));
    if (horizontal) {
      canvas.line("tick", p, kHeight - kMargin, p, kHeight - kMargin + 5, "black");
      canvas.text("tick", p, kHeight - kMargin + 18, exp_label(e));
    } else {
      canvas.line("tick", kMargin - 5, p, kMargin, p, "black");
      canvas.text("tick", kMargin - 8, p + 4, exp_label(e), "end");
    }
  }
}

}  // namespace

void write_psd_svg(const std::filesystem::path& file, const SpectrumDensity& spectrum,
                   const std::string& title) {
  std::vector<std::pair<double, double>> logs;
  const std::size_t bins = spectrum.one_sided_bins();
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = spectrum.frequencies[k];
    const double d = spectrum.density[k];
    if (f > 0.0 && d > 0.0) logs.emplace_back(std::log10(f), std::log10(d));
  }

  double xlo = std::log10(spectrum.nyquist) - 3.0, xhi = std::log10(spectrum.nyquist);
  double ylo = -1.0, yhi = 1.0;
  if (!logs.empty()) {
    xlo = xhi = logs.front().first;
    ylo = yhi = logs.front().second;
    for (const auto& [lx, ly] : logs) {
      xlo = std::min(xlo, lx);
      xhi = std::max(xhi, lx);
      ylo = std::min(ylo, ly);
      yhi = std::max(yhi, ly);
    }
  }
  xhi = std::max(xhi, std::log10(spectrum.nyquist));  // keep the annotation inside
  pad(xlo, xhi);
  pad(ylo, yhi);
  const Axis ax = x_axis(xlo, xhi);
  const Axis ay = y_axis(ylo, yhi);

  Canvas canvas("data-xscale=\"log\" data-yscale=\"log\"");
  canvas.title(title);
  log_ticks(canvas, ax, true);
  log_ticks(canvas, ay, false);

  std::vector<std::pair<double, double>> pts;
  pts.reserve(logs.size());
  for (const auto& [lx, ly] : logs) pts.emplace_back(ax.map(lx), ay.map(ly));
  canvas.polyline("series", pts, "black");

  const double nx = ax.map(std::log10(spectrum.nyquist));
  canvas.line("nyquist", nx, kMargin, nx, kHeight - kMargin, "red",
              "data-frequency=\"" + format_double(spectrum.nyquist) + "\"");
  canvas.text("annotation", nx - 6, kMargin + 14, "f_NQ = " + format_double(spectrum.nyquist),
              "end");
  canvas.text("axis-label", kWidth / 2, kHeight - 14, "frequency (log)");
  canvas.write_to(file);
}

void write_cusum_svg(const std::filesystem::path& file, const CusumOutcome& outcome,
                     const std::string& title) {
  double span = 1e-9;
  for (const double v : outcome.path.values) span = std::max(span, std::abs(v));
  for (const double b : outcome.boundary.values) span = std::max(span, std::abs(b));
  span *= 1.1;

  const Axis ax = x_axis(0.0, 1.0);
  const Axis ay = y_axis(-span, span);

  Canvas canvas("data-kind=\"" + to_string(outcome.path.kind) + "\"");
  canvas.title(title);
  canvas.line("axis", kMargin, ay.map(0.0), kWidth - kMargin, ay.map(0.0), "gray");

  std::vector<std::pair<double, double>> upper, lower, process;
  for (std::size_t j = 0; j < outcome.path.taus.size(); ++j) {
    const double x = ax.map(outcome.path.taus[j]);
    upper.emplace_back(x, ay.map(outcome.boundary.values[j]));
    lower.emplace_back(x, ay.map(-outcome.boundary.values[j]));
    process.emplace_back(x, ay.map(outcome.path.values[j]));
  }
  canvas.polyline("boundary", upper, "red", "4,3");
  canvas.polyline("boundary", lower, "red", "4,3");
  canvas.polyline("path", process, "black");
  canvas.text("axis-label", kWidth / 2, kHeight - 14, "tau");
  canvas.text("annotation", kWidth - kMargin, kMargin + 14,
              outcome.crossed ? "crossed" : "not crossed", "end");
  canvas.write_to(file);
}

void write_dtw_alignment_svg(const std::filesystem::path& file, std::span<const double> x,
                             std::span<const double> y,
                             const std::vector<std::pair<std::size_t, std::size_t>>& path,
                             const std::string& x_label, const std::string& y_label,
                             const std::string& title) {
  if (x.empty() || y.empty()) {
    throw InsufficientDataError("alignment plot needs nonempty series");
  }
  const auto minmax = [](std::span<const double> s) {
    double lo = s[0], hi = s[0];
    for (const double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;
    return std::pair<double, double>{lo, hi};
  };
  const auto [xlo, xhi] = minmax(x);
  const auto [ylo, yhi] = minmax(y);

  // Upper band for x, lower band for y, each series normalized to its band.
  const double band = (kHeight - 2 * kMargin - 40.0) / 2.0;
  const Axis ix = x_axis(0.0, static_cast<double>(x.size() - 1));
  const Axis iy = x_axis(0.0, static_cast<double>(y.size() - 1));
  const Axis bx{xlo, xhi, kMargin + band, kMargin};
  const Axis by{ylo, yhi, kHeight - kMargin, kHeight - kMargin - band};

  Canvas canvas("");
  canvas.title(title);

  for (const auto& [i, j] : path) {
    canvas.line("link", ix.map(static_cast<double>(i)), bx.map(x[i]),
                iy.map(static_cast<double>(j)), by.map(y[j]), "#bbbbbb");
  }
  std::vector<std::pair<double, double>> top, bottom;
  for (std::size_t i = 0; i < x.size(); ++i) {
    top.emplace_back(ix.map(static_cast<double>(i)), bx.map(x[i]));
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    bottom.emplace_back(iy.map(static_cast<double>(j)), by.map(y[j]));
  }
  canvas.polyline("series", top, "black");
  canvas.polyline("series", bottom, "blue");
  canvas.text("label", kMargin + 4, kMargin + 14, x_label, "start");
  canvas.text("label", kMargin + 4, kHeight - kMargin - band + 14, y_label, "start");
  canvas.write_to(file);
}

}  // namespace stabkit
