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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stabkit/csv.hpp"
#include "stabkit/date.hpp"
#include "stabkit/fetch.hpp"
#include "stabkit/series.hpp"
#include "stabkit/similarity.hpp"
#include "stabkit/spectral.hpp"
#include "stabkit/structural.hpp"

namespace stabkit {

inline constexpr std::string_view kToolName = "stabkit";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a over raw bytes; the checksum used throughout manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Where one asset's price history comes from.
struct AssetSource {
  enum class Kind { Csv, Api };

  std::string tag;
  Kind kind = Kind::Csv;
  std::string location;  ///< CSV file path, or API symbol (defaults to tag)
  CsvSchema schema;      ///< CSV column mapping
};

/// Labeled sub-range of the analysis range (recursive-CUSUM start windows).
struct WindowSpec {
  std::string label;
  DateRange range;
};

/// Pipeline stages; subcommands enable subsets, `report` enables all.
enum Stage : unsigned {
  kStageStats = 1u << 0,
  kStageFilter = 1u << 1,
  kStageSpectrum = 1u << 2,
  kStageCorrelate = 1u << 3,
  kStageDtw = 1u << 4,
  kStageCusum = 1u << 5,
  kStagePlots = 1u << 6,
  kStageAll = (1u << 7) - 1,
};

enum class FilterScope { FullSample, PerYear };

/// Everything a run needs, normally parsed from a JSON document. CLI flags
/// (--out, --seed, --offline) override the corresponding fields after
/// parsing. Field-by-field defaults are documented in the README; the
/// parser rejects unknown keys.
struct PipelineConfig {
  std::vector<AssetSource> assets;
  DateRange range;
  AlignPolicy alignment = AlignPolicy::Intersect;
  double annualization = 365.0;
  double sampling_interval = 100.0;
  FilterScope filter_scope = FilterScope::FullSample;
  std::optional<std::size_t> q_override;

  std::vector<std::string> baseline_assets;  ///< DTW normalization pairs; empty = resolve at run
  std::vector<std::string> key_assets;       ///< regression conditioning set; empty = built-in default
  std::vector<std::string> cusum_targets;    ///< empty = every asset
  std::vector<WindowSpec> cusum_windows;     ///< recursive-CUSUM windows; empty disables Rec-CUSUM
  std::vector<FilterState> filter_states{FilterState::Pre, FilterState::Post};

  BoundarySpec ols_boundary{BoundaryKind::OlsConst, 1.358, false};
  BoundarySpec rec_boundary{BoundaryKind::RecLinear, 0.948, false};

  std::array<std::string, 2> dtw_plot_pair{"", ""};  ///< empty = first two baseline assets
  bool dtw_standardize = false;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  bool offline = false;
  EndpointConfig endpoint;
  std::filesystem::path cache_dir = "cache";
  bool plots = true;
  unsigned stages = kStageAll;

  /// Parse + validate. Relative CSV/cache/output paths stay relative (the
  /// CLI resolves them against the config file's directory).
  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig from_json_file(const std::filesystem::path& file);

  /// Canonical JSON of the fully resolved config (defaults applied).
  std::string canonical_json() const;
  /// fnv1a64_hex(canonical_json()).
  std::string hash() const;
};

/// One file the pipeline wrote, relative to the output directory.
struct ArtifactRecord {
  std::string path;
  std::uint64_t bytes = 0;
  std::string checksum;  ///< fnv1a64 hex of the file contents
};

/// One structural-stability verdict, as serialized to cusum_records.json.
struct CusumRecord {
  std::string target;
  std::string window;
  FilterState filter_state = FilterState::Pre;
  CusumKind kind = CusumKind::Ols;
  BoundarySpec boundary;
  double sup_statistic = 0.0;
  bool crossed = false;
  std::optional<double> first_crossing_tau;
};

struct SpectrumEntry {
  std::string asset;
  FilterState state = FilterState::Pre;
  SpectrumDensity density;
};

struct CusumEntry {
  CusumRecord record;
  CusumOutcome outcome;
};

struct DtwAlignmentEntry {
  std::string asset_x;
  std::string asset_y;
  std::string period;
  FilterState state = FilterState::Pre;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// In-memory results plus the on-disk artifact ledger for one run.
struct ReportBundle {
  std::filesystem::path output_dir;
  std::string config_hash;
  std::vector<ArtifactRecord> artifacts;  ///< sorted by path when the manifest is written

  std::vector<std::string> assets;                 ///< aligned panel column order
  std::vector<std::pair<std::string, StatsSummary>> daily_stats;
  std::vector<SpectrumEntry> spectra;
  std::vector<CorrelationMatrix> correlations;
  std::vector<DtwMatrix> dtw_matrices;
  std::vector<CusumEntry> cusum;
  std::vector<DtwAlignmentEntry> dtw_alignments;
  std::vector<std::string> skipped_plots;          ///< listed, non-fatal
};

/// Runs every enabled stage over the configured data and writes artifacts
/// plus manifest.json under config.output_dir. Deterministic for a fixed
/// (config, cache, seed): re-running produces byte-identical CSV/JSON.
/// On a stage failure the partial artifact set is written to a failure
/// manifest and an Error naming the stage and asset is thrown.
ReportBundle run_pipeline(const PipelineConfig& config);

/// Renders the SVG figures for whatever the bundle holds (periodograms,
/// fluctuation processes with their bands, the configured warping-path
/// alignment) into <output_dir>/plots. Appends the files to
/// bundle.artifacts and returns just the newly written records. Missing
/// inputs are recorded in bundle.skipped_plots, never fatal. An empty
/// bundle yields zero files.
std::vector<ArtifactRecord> render_plots(ReportBundle& bundle);

/// Assemble the price data for every configured asset (network or cache for
/// API sources, local files for CSV sources). Used by the fetch subcommand
/// and internally by run_pipeline. The optional callback fires with each
/// asset tag before that asset is loaded, so callers can attribute failures.
struct AssembledAsset {
  std::string tag;
  PriceSeries prices;
  std::vector<Date> missing_days;
  bool from_cache = false;
};
std::vector<AssembledAsset> assemble_assets(
    const PipelineConfig& config,
    const std::function<void(const std::string&)>& on_asset = {});

}  // namespace stabkit
