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

// Release-gate checks, one numbered criterion per function. Each prints a
// single PASS/FAIL line; the exit code is the number of failures. Tolerances
// and runtime budgets are pinned here on purpose: loosening them is a
// deliberate, reviewable act, not a test-run accident.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "stabkit/date.hpp"
#include "stabkit/lowfreq.hpp"
#include "stabkit/pipeline.hpp"
#include "stabkit/series.hpp"
#include "stabkit/similarity.hpp"
#include "stabkit/spectral.hpp"
#include "stabkit/structural.hpp"

#ifndef STABKIT_REPO_DIR
#error "STABKIT_REPO_DIR must point at the repository root"
#endif

using namespace stabkit;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& info) {
    if (!detail.empty()) detail += "; ";
    detail += info;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void enforce_budget(Criterion& c, double elapsed, double budget) {
  if (elapsed >= budget) {
    c.fail("runtime " + fmt(elapsed) + " s exceeds the " + fmt(budget) + " s budget");
  } else {
    c.note(fmt(elapsed) + " s");
  }
}

std::vector<double> random_series(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> out(n);
  for (auto& v : out) v = g(rng);
  return out;
}

// --- criterion 1: DCT round-trip and projection properties ----------------

Criterion criterion_dct_projection() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> pick_len(1, 512);

  double worst = 0.0;
  for (int rep = 0; rep < 1000 && c.pass; ++rep) {
    const std::size_t n = pick_len(rng);
    const auto x = random_series(n, rng);
    std::uniform_int_distribution<std::size_t> pick_q(1, n);
    const std::size_t q = pick_q(rng);

    const auto back = idct(dct(x));
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(back[j] - x[j]));
    }

    const auto y = random_series(n, rng);
    const auto px = mw_project(x, q);
    const auto py = mw_project(y, q);
    const auto ppx = mw_project(px, q);
    std::vector<double> mix(n);
    for (std::size_t j = 0; j < n; ++j) mix[j] = 2.0 * x[j] - 3.0 * y[j];
    const auto pmix = mw_project(mix, q);

    double mean_x = 0.0, mean_px = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(ppx[j] - px[j]));
      worst = std::max(worst, std::abs(pmix[j] - (2.0 * px[j] - 3.0 * py[j])));
      mean_x += x[j];
      mean_px += px[j];
    }
    worst = std::max(worst, std::abs(mean_px - mean_x) / static_cast<double>(n));

    if (worst > 1e-10) {
      c.fail("error " + fmt(worst) + " above 1e-10 at n=" + std::to_string(n) +
             ", q=" + std::to_string(q));
    }
  }
  if (c.pass) c.note("1000 series, worst error " + fmt(worst));
  enforce_budget(c, seconds_since(t0), 5.0);
  return c;
}

// --- criterion 2: DFT oracle equivalence and Parseval ----------------------

Criterion criterion_dft_oracle() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);

  double worst_rel = 0.0;
  for (std::size_t n = 1; n <= 64 && c.pass; ++n) {
    const auto x = random_series(n, rng);
    const auto got = dft(x);
    const auto want = testsupport::naive_dft(x);
    double scale = 0.0;
    for (const auto& w : want) scale = std::max(scale, std::abs(w));
    if (scale == 0.0) scale = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double rel = std::abs(got.bin(k) - want[k - 1]) / scale;
      worst_rel = std::max(worst_rel, rel);
    }
    if (worst_rel > 1e-12) {
      c.fail("relative error " + fmt(worst_rel) + " above 1e-12 at n=" + std::to_string(n));
    }
  }

  double worst_parseval = 0.0;
  std::vector<std::size_t> lengths;
  for (std::size_t n = 2; n <= 64; ++n) lengths.push_back(n);
  for (const std::size_t n : {100, 128, 255, 256, 333, 512, 1000, 1024,
                              1258, 1420, 2048, 3000, 4095, 4096}) {
    lengths.push_back(n);
  }
  for (const std::size_t n : lengths) {
    const auto x = random_series(n, rng);
    const auto spec = dft(x);
    double time_energy = 0.0, freq_energy = 0.0;
    for (const double v : x) time_energy += v * v;
    for (const auto& q : spec.coefficients) freq_energy += std::norm(q);
    freq_energy /= static_cast<double>(n);
    worst_parseval =
        std::max(worst_parseval, std::abs(freq_energy - time_energy) / time_energy);
  }
  if (worst_parseval > 1e-9) {
    c.fail("Parseval relative error " + fmt(worst_parseval) + " above 1e-9");
  }
  if (c.pass) {
    c.note("oracle rel " + fmt(worst_rel) + ", Parseval rel " + fmt(worst_parseval));
  }
  enforce_budget(c, seconds_since(t0), 10.0);
  return c;
}

// --- criterion 3: pinned constants -----------------------------------------

Criterion criterion_constants() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();

  if (truncation_order(1420) != 145) c.fail("truncation_order(1420) != 145");
  if (nyquist_frequency(100.0) != 0.005) c.fail("nyquist(100) != 0.005");
  const double p = kolmogorov_cdf(1.358);
  if (std::abs(p - 0.950) > 1e-3) c.fail("kolmogorov_cdf(1.358) = " + fmt(p));
  const double nu = critical_value(0.95);
  if (std::abs(nu - 1.358) > 1e-3) c.fail("critical_value(0.95) = " + fmt(nu));

  if (c.pass) c.note("cdf(1.358)=" + fmt(p) + ", cv(0.95)=" + fmt(nu));
  enforce_budget(c, seconds_since(t0), 1.0);
  return c;
}

// --- criterion 4: exhaustive DTW oracle ------------------------------------

Criterion criterion_dtw_exhaustive() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();

  // All sequences of lengths 1..5 over the alphabet {0, 1, 2}.
  std::vector<std::vector<double>> sequences;
  for (std::size_t len = 1; len <= 5; ++len) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= 3;
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<double> seq(len);
      std::size_t rest = code;
      for (std::size_t i = 0; i < len; ++i) {
        seq[i] = static_cast<double>(rest % 3);
        rest /= 3;
      }
      sequences.push_back(std::move(seq));
    }
  }

  std::size_t pairs = 0, bad_distance = 0, bad_path = 0, asym = 0;
  for (std::size_t a = 0; a < sequences.size(); ++a) {
    for (std::size_t b = a; b < sequences.size(); ++b) {
      ++pairs;
      const auto& x = sequences[a];
      const auto& y = sequences[b];
      const auto res = dtw(x, y);
      const double want = testsupport::exhaustive_dtw(x, y);
      if (std::abs(res.distance - want) > 1e-12) ++bad_distance;
      if (!testsupport::admissible_path(res.path, x.size(), y.size()) ||
          std::abs(testsupport::path_cost(x, y, res.path) - res.distance) > 1e-12) {
        ++bad_path;
      }
      if (std::abs(dtw_distance(y, x) - res.distance) > 1e-12) ++asym;
    }
  }
  if (bad_distance > 0) c.fail(std::to_string(bad_distance) + " distance mismatches");
  if (bad_path > 0) c.fail(std::to_string(bad_path) + " inadmissible paths");
  if (asym > 0) c.fail(std::to_string(asym) + " symmetry violations");
  if (c.pass) c.note(std::to_string(pairs) + " pairs checked");
  enforce_budget(c, seconds_since(t0), 60.0);
  return c;
}

// --- criterion 5: CUSUM size and path variance (Monte Carlo) ---------------

Criterion criterion_cusum_monte_carlo() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t n = 500, k = 7, reps = 10000;
  const std::vector<double> beta{0.5, 0.2, -0.3, 0.1, 0.0, 0.25, -0.15};
  const double nu = critical_value(0.95);
  const std::vector<double> taus{0.25, 0.5, 0.75};

  std::mt19937_64 rng(20260825);
  std::normal_distribution<double> g;

  std::size_t rejections = 0;
  std::vector<double> ols_sq(taus.size(), 0.0), rec_sq(taus.size(), 0.0);
  std::vector<double> rec_tau_used(taus.size(), 0.0);

  RegressionDesign design;
  design.target = "Y";
  design.X.resize(n, k);
  design.y.resize(n);
  for (std::size_t i = 0; i < k; ++i) design.regressor_names.push_back("x" + std::to_string(i));
  for (std::size_t r = 0; r < n; ++r) design.dates.push_back(Date(2020, 1, 1));

  for (std::size_t rep = 0; rep < reps; ++rep) {
    for (std::size_t r = 0; r < n; ++r) {
      design.X(static_cast<Eigen::Index>(r), 0) = 1.0;
      double mean = beta[0];
      for (std::size_t col = 1; col < k; ++col) {
        const double v = g(rng);
        design.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = v;
        mean += beta[col] * v;
      }
      design.y(static_cast<Eigen::Index>(r)) = mean + g(rng);
    }

    const auto fit = ols_fit(design);
    const auto path = ols_cusum(fit);
    double sup = 0.0;
    for (const double v : path.values) sup = std::max(sup, std::abs(v));
    if (sup > nu) ++rejections;
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const auto j = static_cast<std::size_t>(taus[t] * static_cast<double>(n) + 0.5);
      ols_sq[t] += path.values[j] * path.values[j];
    }

    const auto rr = recursive_residuals(design);
    const auto rpath = rec_cusum(rr, sample_sd(rr.values));
    const std::size_t m = rr.values.size();
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const auto j = static_cast<std::size_t>(taus[t] * static_cast<double>(m) + 0.5);
      rec_sq[t] += rpath.values[j] * rpath.values[j];
      rec_tau_used[t] = rpath.taus[j];
    }
  }

  const double rate = static_cast<double>(rejections) / static_cast<double>(reps);
  if (std::abs(rate - 0.05) > 0.01) {
    c.fail("rejection rate " + fmt(rate) + " outside 0.05 +- 0.01");
  } else {
    c.note("rejection rate " + fmt(rate));
  }
  for (std::size_t t = 0; t < taus.size(); ++t) {
    const double ols_var = ols_sq[t] / static_cast<double>(reps);
    const double want_ols = taus[t] * (1.0 - taus[t]);
    if (std::abs(ols_var - want_ols) > 0.02) {
      c.fail("ols var(" + fmt(taus[t]) + ") = " + fmt(ols_var) + ", want " + fmt(want_ols));
    }
    const double rec_var = rec_sq[t] / static_cast<double>(reps);
    const double want_rec = rec_tau_used[t];
    if (std::abs(rec_var - want_rec) > 0.02) {
      c.fail("rec var(" + fmt(taus[t]) + ") = " + fmt(rec_var) + ", want " + fmt(want_rec));
    }
  }
  enforce_budget(c, seconds_since(t0), 120.0);
  return c;
}

// --- criterion 6: noiseless regression -------------------------------------

Criterion criterion_noiseless() {
  Criterion c;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  const std::size_t n = 200, k = 5;
  const std::vector<double> beta{0.7, -0.2, 1.5, 0.01, -3.0};

  RegressionDesign design;
  design.target = "Y";
  design.X.resize(n, k);
  design.y.resize(n);
  for (std::size_t i = 0; i < k; ++i) design.regressor_names.push_back("x" + std::to_string(i));
  for (std::size_t r = 0; r < n; ++r) {
    design.dates.push_back(Date(2020, 1, 1));
    design.X(static_cast<Eigen::Index>(r), 0) = 1.0;
    double mean = beta[0];
    for (std::size_t col = 1; col < k; ++col) {
      const double v = g(rng);
      design.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = v;
      mean += beta[col] * v;
    }
    design.y(static_cast<Eigen::Index>(r)) = mean;  // exact, no noise term
  }

  const auto rr = recursive_residuals(design);
  double worst = 0.0;
  for (const double v : rr.values) worst = std::max(worst, std::abs(v));

  const auto path = ols_cusum(ols_fit(design));
  for (const double v : path.values) worst = std::max(worst, std::abs(v));

  if (worst > 1e-10) {
    c.fail("residual magnitude " + fmt(worst) + " above 1e-10");
  } else {
    c.note("max |residual| " + fmt(worst));
  }
  return c;
}

// --- criteria 7 and 8: fixture panel reproduction and determinism ----------

PipelineConfig load_fixture_config(const fs::path& output_dir) {
  const fs::path repo(STABKIT_REPO_DIR);
  const fs::path config_file = repo / "configs" / "fixture_panel.json";
  auto cfg = PipelineConfig::from_json_file(config_file);
  // Resolve config-relative paths the same way the CLI does, then pin the
  // output directory so both determinism runs share one location.
  const fs::path base = config_file.parent_path();
  for (auto& asset : cfg.assets) {
    if (asset.kind == AssetSource::Kind::Csv && fs::path(asset.location).is_relative()) {
      asset.location = (base / asset.location).lexically_normal().string();
    }
  }
  if (cfg.cache_dir.is_relative()) cfg.cache_dir = (base / cfg.cache_dir).lexically_normal();
  cfg.output_dir = output_dir;
  return cfg;
}

Criterion criterion_fixture_panel(const ReportBundle& bundle) {
  Criterion c;
  const fs::path repo(STABKIT_REPO_DIR);
  const std::map<std::string, std::size_t> want_n{
      {"BTC", 1258}, {"ETH", 1258}, {"XRP", 1258}, {"MSCI", 1258},
      {"JPY", 1249}, {"EUR", 1249}, {"GOLD", 1249}, {"SP500", 1249}};

  double worst = 0.0;
  for (const auto& [tag, n] : want_n) {
    const auto prices = load_price_csv(repo / "data" / "fixtures" / (tag + ".csv"));
    const auto daily = to_returns(prices, 1.0);
    const auto stats = describe(daily);
    if (stats.n != n) {
      c.fail(tag + " has n=" + std::to_string(stats.n) + ", want " + std::to_string(n));
      continue;
    }
    const auto oracle = testsupport::spreadsheet_moments(daily.values());
    worst = std::max(worst, std::abs(stats.mean - static_cast<double>(oracle.mean) * 100));
    worst = std::max(worst, std::abs(stats.sd - static_cast<double>(oracle.sd) * 100));
    worst = std::max(worst, std::abs(stats.min - static_cast<double>(oracle.min) * 100));
    worst = std::max(worst, std::abs(stats.max - static_cast<double>(oracle.max) * 100));
    worst = std::max(worst,
                     std::abs(stats.skewness - static_cast<double>(oracle.skewness)));
    worst = std::max(
        worst, std::abs(stats.kurtosis - static_cast<double>(oracle.excess_kurtosis)));
  }
  if (worst > 1e-9) {
    c.fail("moment deviation " + fmt(worst) + " above 1e-9");
  } else if (c.pass) {
    c.note("N bookkeeping 1258/1249 exact, moment deviation " + fmt(worst));
  }

  // Qualitative stability verdicts are reported, not asserted: the reference
  // pattern is crypto series crossing before filtering and not after.
  std::size_t pre_crossed = 0, post_clear = 0;
  for (const auto& entry : bundle.cusum) {
    const auto& r = entry.record;
    if (r.kind != CusumKind::Ols || r.window != "full") continue;
    if (r.target != "BTC" && r.target != "ETH" && r.target != "XRP") continue;
    if (r.filter_state == FilterState::Pre && r.crossed) ++pre_crossed;
    if (r.filter_state == FilterState::Post && !r.crossed) ++post_clear;
  }
  c.note("crypto verdicts vs reference pattern: " + std::to_string(pre_crossed) +
         "/3 crossed pre-filter, " + std::to_string(post_clear) + "/3 clear post-filter");
  return c;
}

Criterion criterion_determinism(const PipelineConfig& cfg, const ReportBundle& first_bundle) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out = cfg.output_dir;

  std::map<std::string, std::string> first;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    first[fs::relative(entry.path(), out).string()] = buf.str();
  }

  run_pipeline(cfg);

  std::size_t seen = 0, diffs = 0;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    ++seen;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rel = fs::relative(entry.path(), out).string();
    auto it = first.find(rel);
    if (it == first.end() || it->second != buf.str()) ++diffs;
  }
  if (diffs > 0 || seen != first.size()) {
    c.fail(std::to_string(diffs) + " files differ between runs (" + std::to_string(seen) +
           " vs " + std::to_string(first.size()) + ")");
  }

  // Inventory must match the configured grid exactly.
  std::size_t years = 0;
  for (int y = cfg.range.start.year(); y <= cfg.range.end.year(); ++y) ++years;
  const std::size_t states = cfg.filter_states.size();
  const std::size_t targets =
      cfg.cusum_targets.empty() ? cfg.assets.size() : cfg.cusum_targets.size();
  const std::size_t windows = cfg.cusum_windows.size();
  const std::size_t assets = cfg.assets.size();

  const std::size_t want_corr = years * states;
  const std::size_t want_dtw = years * states;
  const std::size_t want_ols = targets * states;
  const std::size_t want_rec = targets * windows * states;
  const std::size_t want_spectra = assets * states;
  const std::size_t want_plots = want_spectra + want_ols + want_rec + years * states;

  std::ifstream mf(out / "manifest.json");
  const auto manifest = nlohmann::json::parse(mf);
  const auto& inv = manifest.at("inventory");
  auto check_count = [&](const char* key, std::size_t want) {
    const auto got = inv.at(key).get<std::size_t>();
    if (got != want) {
      c.fail(std::string(key) + " = " + std::to_string(got) + ", want " + std::to_string(want));
    }
  };
  check_count("correlation_matrices", want_corr);
  check_count("dtw_matrices", want_dtw);
  check_count("cusum_ols", want_ols);
  check_count("cusum_rec", want_rec);
  check_count("spectra", want_spectra);
  check_count("stats_tables", 2);
  check_count("filtered_series", assets);
  check_count("plots", want_plots);
  if (!manifest.at("failure").is_null()) c.fail("manifest records a failure");
  if (manifest.at("config_hash") != first_bundle.config_hash) c.fail("config hash drifted");

  if (c.pass) {
    c.note(std::to_string(first.size()) + " files byte-identical, inventory grid exact");
  }
  enforce_budget(c, seconds_since(t0), 120.0);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int number;
    std::string title;
    std::function<Criterion()> run;
  };

  // Criteria 7 and 8 share one pipeline execution over the bundled fixture.
  fs::path accept_out = fs::temp_directory_path() / "stabkit_acceptance_out";
  fs::remove_all(accept_out);
  PipelineConfig fixture_cfg;
  ReportBundle fixture_bundle;
  std::string fixture_error;
  try {
    fixture_cfg = load_fixture_config(accept_out);
    fixture_bundle = run_pipeline(fixture_cfg);
  } catch (const std::exception& e) {
    fixture_error = e.what();
  }

  const std::vector<Entry> entries{
      {1, "dct round-trip and mw projection properties", criterion_dct_projection},
      {2, "dft oracle equivalence and Parseval identity", criterion_dft_oracle},
      {3, "pinned analysis constants", criterion_constants},
      {4, "dtw exhaustive-path oracle", criterion_dtw_exhaustive},
      {5, "cusum Monte Carlo size and path variance", criterion_cusum_monte_carlo},
      {6, "noiseless regression zero residuals", criterion_noiseless},
      {7, "fixture panel bookkeeping and moments",
       [&] {
         if (!fixture_error.empty()) {
           Criterion c;
           c.fail("fixture pipeline failed: " + fixture_error);
           return c;
         }
         return criterion_fixture_panel(fixture_bundle);
       }},
      {8, "pipeline determinism and inventory",
       [&] {
         if (!fixture_error.empty()) {
           Criterion c;
           c.fail("fixture pipeline failed: " + fixture_error);
           return c;
         }
         return criterion_determinism(fixture_cfg, fixture_bundle);
       }},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    Criterion result;
    try {
      result = entry.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("unexpected exception: ") + e.what();
    }
    if (!result.pass) ++failures;
    std::printf("%s criterion %d: %s%s%s\n", result.pass ? "PASS" : "FAIL", entry.number,
                entry.title.c_str(), result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
  }

  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, entries.size());
  } else {
    std::printf("all %zu criteria passed\n", entries.size());
  }
  return failures;
}
