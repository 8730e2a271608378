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

#include "stabkit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stabkit/errors.hpp"
#include "stabkit/lowfreq.hpp"
#include "stabkit/svg.hpp"

namespace stabkit {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Config parsing

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

Date parse_config_date(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be an ISO date string");
  try {
    return Date::parse(j.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

DateRange parse_range_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object {start, end}");
  reject_unknown_keys(j, {"start", "end"}, where);
  if (!j.contains("start") || !j.contains("end")) {
    throw ConfigError(where + " needs both start and end");
  }
  return DateRange{parse_config_date(j["start"], where + ".start"),
                   parse_config_date(j["end"], where + ".end")};
}

FilterState parse_filter_state(const std::string& s, const std::string& where) {
  if (s == "pre") return FilterState::Pre;
  if (s == "post") return FilterState::Post;
  throw ConfigError(where + ": filter state must be \"pre\" or \"post\", got \"" + s + "\"");
}

BoundarySpec parse_boundary(const json& j, const BoundarySpec& defaults,
                            const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown_keys(j, {"kind", "level", "printed_form"}, where);
  BoundarySpec spec = defaults;
  if (j.contains("kind")) {
    try {
      spec.kind = boundary_kind_from_string(j["kind"].get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (j.contains("level")) spec.level = j["level"].get<double>();
  if (j.contains("printed_form")) spec.printed_rec_linear = j["printed_form"].get<bool>();
  if (!(spec.level > 0.0)) throw ConfigError(where + ".level must be positive");
  return spec;
}

std::vector<std::string> parse_string_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ConfigError(where + " must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void require_subset(const std::vector<std::string>& set, const std::set<std::string>& universe,
                    const std::string& where) {
  for (const auto& tag : set) {
    if (!universe.count(tag)) {
      throw ConfigError(where + " names unknown asset '" + tag + "'");
    }
  }
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (const char c : label) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '-';
  }
  return out;
}

const char* to_cstr(FilterScope scope) {
  return scope == FilterScope::FullSample ? "full-sample" : "per-year";
}
const char* to_cstr(AlignPolicy policy) {
  return policy == AlignPolicy::Intersect ? "intersect" : "crypto-calendar";
}

json boundary_json(const BoundarySpec& spec) {
  return json{{"kind", to_string(spec.kind)},
              {"level", spec.level},
              {"printed_form", spec.printed_rec_linear}};
}

// ---------------------------------------------------------------------------
// Artifact writing

class ArtifactSink {
public:
  ArtifactSink(std::filesystem::path root, std::vector<ArtifactRecord>& records)
      : root_(std::move(root)), records_(records) {}

  void write(const std::string& rel_path, const std::string& content) {
    const auto full = root_ / rel_path;
    std::error_code ec;
    std::filesystem::create_directories(full.parent_path(), ec);
    std::ofstream out(full, std::ios::binary);
    if (!out) throw ConfigError("cannot write artifact '" + full.string() + "'");
    out << content;
    out.close();
    if (!out) throw ConfigError("short write on artifact '" + full.string() + "'");
    records_.push_back(ArtifactRecord{rel_path, content.size(), fnv1a64_hex(content)});
  }

private:
  std::filesystem::path root_;
  std::vector<ArtifactRecord>& records_;
};

std::string matrix_csv(const std::vector<std::string>& assets, const Eigen::MatrixXd& values) {
  std::ostringstream out;
  out << "asset";
  for (const auto& tag : assets) out << "," << tag;
  out << "\n";
  for (std::size_t i = 0; i < assets.size(); ++i) {
    out << assets[i];
    for (std::size_t j = 0; j < assets.size(); ++j) {
      out << ","
          << format_double(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << "\n";
  }
  return out.str();
}

json matrix_values_json(const Eigen::MatrixXd& values) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < values.cols(); ++j) row.push_back(values(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string stats_csv(const std::vector<std::pair<std::string, StatsSummary>>& stats) {
  std::ostringstream out;
  out << "asset,n,mean_pct,sd_pct,min_pct,max_pct,skewness,excess_kurtosis\n";
  for (const auto& [tag, s] : stats) {
    out << tag << "," << s.n << "," << format_double(s.mean) << "," << format_double(s.sd)
        << "," << format_double(s.min) << "," << format_double(s.max) << ","
        << format_double(s.skewness) << "," << format_double(s.kurtosis) << "\n";
  }
  return out.str();
}

json cusum_record_json(const CusumRecord& r) {
  json j{{"target", r.target},
         {"window", r.window},
         {"filter_state", to_string(r.filter_state)},
         {"kind", to_string(r.kind)},
         {"boundary", boundary_json(r.boundary)},
         {"sup_statistic", r.sup_statistic},
         {"crossed", r.crossed}};
  if (r.first_crossing_tau) {
    j["first_crossing_tau"] = *r.first_crossing_tau;
  } else {
    j["first_crossing_tau"] = nullptr;
  }
  return j;
}

struct FailureInfo {
  std::string stage;
  std::string subject;
  std::string message;
};

void write_manifest(const PipelineConfig& config, ReportBundle& bundle,
                    const std::optional<FailureInfo>& failure) {
  std::sort(bundle.artifacts.begin(), bundle.artifacts.end(),
            [](const ArtifactRecord& a, const ArtifactRecord& b) { return a.path < b.path; });

  std::size_t ols_count = 0, rec_count = 0;
  for (const auto& entry : bundle.cusum) {
    (entry.record.kind == CusumKind::Ols ? ols_count : rec_count) += 1;
  }
  std::size_t plot_count = 0, filtered_count = 0, stats_count = 0;
  for (const auto& a : bundle.artifacts) {
    if (a.path.rfind("plots/", 0) == 0) ++plot_count;
    if (a.path.rfind("filtered/", 0) == 0) ++filtered_count;
    if (a.path.rfind("stats/", 0) == 0) ++stats_count;
  }

  json manifest;
  manifest["config_hash"] = bundle.config_hash;
  manifest["seed"] = config.seed;
  manifest["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  manifest["inventory"] = {{"stats_tables", stats_count},
                           {"filtered_series", filtered_count},
                           {"spectra", bundle.spectra.size()},
                           {"correlation_matrices", bundle.correlations.size()},
                           {"dtw_matrices", bundle.dtw_matrices.size()},
                           {"cusum_ols", ols_count},
                           {"cusum_rec", rec_count},
                           {"plots", plot_count}};
  if (failure) {
    manifest["failure"] = {{"stage", failure->stage},
                           {"subject", failure->subject},
                           {"message", failure->message}};
  } else {
    manifest["failure"] = nullptr;
  }
  if (!bundle.skipped_plots.empty()) manifest["skipped_plots"] = bundle.skipped_plots;
  json artifacts = json::array();
  for (const auto& a : bundle.artifacts) {
    artifacts.push_back(
        json{{"path", a.path}, {"bytes", a.bytes}, {"checksum", a.checksum}});
  }
  manifest["artifacts"] = std::move(artifacts);

  std::error_code ec;
  std::filesystem::create_directories(bundle.output_dir, ec);
  std::ofstream out(bundle.output_dir / "manifest.json", std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write manifest under '" + bundle.output_dir.string() + "'");
  }
  out << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Analysis helpers

AlignedPanel filtered_panel(const AlignedPanel& panel, FilterScope scope,
                            std::optional<std::size_t> q_override) {
  Eigen::MatrixXd values = panel.matrix();
  const auto project_rows = [&](Eigen::Index first, Eigen::Index count) {
    const std::size_t q =
        q_override ? *q_override : truncation_order(static_cast<std::size_t>(count));
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const Eigen::VectorXd segment = values.col(c).segment(first, count);
      const std::vector<double> in(segment.data(), segment.data() + segment.size());
      const std::vector<double> out = mw_project(in, q);
      for (Eigen::Index r = 0; r < count; ++r) {
        values(first + r, c) = out[static_cast<std::size_t>(r)];
      }
    }
  };

  if (scope == FilterScope::FullSample) {
    project_rows(0, values.rows());
  } else {
    const auto& dates = panel.dates();
    Eigen::Index first = 0;
    while (first < values.rows()) {
      const int year = dates[static_cast<std::size_t>(first)].year();
      Eigen::Index last = first;
      while (last + 1 < values.rows() &&
             dates[static_cast<std::size_t>(last) + 1].year() == year) {
        ++last;
      }
      project_rows(first, last - first + 1);
      first = last + 1;
    }
  }
  return panel.with_matrix(std::move(values));
}

AlignedPanel standardize_columns(const AlignedPanel& panel) {
  Eigen::MatrixXd values = panel.matrix();
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    const double mean = values.col(c).mean();
    values.col(c).array() -= mean;
    if (values.rows() > 1) {
      const double sd =
          std::sqrt(values.col(c).squaredNorm() / static_cast<double>(values.rows() - 1));
      if (sd > 0.0) values.col(c) /= sd;
    }
  }
  return panel.with_matrix(std::move(values));
}

std::string cusum_csv(const CusumOutcome& outcome) {
  std::ostringstream out;
  out << "tau,value,boundary\n";
  for (std::size_t j = 0; j < outcome.path.taus.size(); ++j) {
    out << format_double(outcome.path.taus[j]) << "," << format_double(outcome.path.values[j])
        << "," << format_double(outcome.boundary.values[j]) << "\n";
  }
  return out.str();
}

ArtifactRecord record_file(const std::filesystem::path& root, const std::string& rel_path) {
  std::ifstream in(root / rel_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return ArtifactRecord{rel_path, bytes.size(), fnv1a64_hex(bytes)};
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

namespace {
PipelineConfig parse_config_object(const json& j);
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  try {
    return parse_config_object(j);
  } catch (const json::exception& e) {
    // Wrong value types surface here (e.g. a string where a number belongs).
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

PipelineConfig parse_config_object(const json& j) {
  reject_unknown_keys(
      j,
      {"assets", "range", "alignment", "annualization", "sampling_interval", "filter_scope",
       "q_override", "baseline_assets", "key_assets", "cusum_targets", "cusum_windows",
       "filter_states", "ols_boundary", "rec_boundary", "dtw_plot_pair", "dtw_standardize",
       "output_dir", "seed", "offline", "api", "cache_dir", "plots"},
      "config");

  PipelineConfig config;

  if (!j.contains("assets") || !j["assets"].is_array() || j["assets"].empty()) {
    throw ConfigError("config needs a nonempty \"assets\" array");
  }
  std::set<std::string> tags;
  for (const auto& item : j["assets"]) {
    if (!item.is_object()) throw ConfigError("each asset must be an object");
    reject_unknown_keys(item, {"tag", "source", "path", "symbol", "date_column", "price_column"},
                        "asset");
    AssetSource src;
    src.tag = item.value("tag", "");
    if (src.tag.empty()) throw ConfigError("asset without a tag");
    if (!tags.insert(src.tag).second) throw ConfigError("duplicate asset tag '" + src.tag + "'");
    const std::string source = item.value("source", "csv");
    if (source == "csv") {
      src.kind = AssetSource::Kind::Csv;
      if (!item.contains("path")) {
        throw ConfigError("csv asset '" + src.tag + "' needs a \"path\"");
      }
      src.location = item["path"].get<std::string>();
    } else if (source == "api") {
      src.kind = AssetSource::Kind::Api;
      src.location = item.value("symbol", src.tag);
    } else {
      throw ConfigError("asset '" + src.tag + "': source must be \"csv\" or \"api\"");
    }
    if (item.contains("date_column")) src.schema.date_column = item["date_column"].get<std::string>();
    if (item.contains("price_column")) src.schema.price_column = item["price_column"].get<std::string>();
    config.assets.push_back(std::move(src));
  }

  if (!j.contains("range")) throw ConfigError("config needs a \"range\"");
  config.range = parse_range_object(j["range"], "range");
  if (config.range.empty()) throw ConfigError("range is empty (start after end)");

  if (j.contains("alignment")) {
    const std::string policy = j["alignment"].get<std::string>();
    if (policy == "intersect") {
      config.alignment = AlignPolicy::Intersect;
    } else if (policy == "crypto-calendar") {
      config.alignment = AlignPolicy::CryptoCalendar;
    } else {
      throw ConfigError("alignment must be \"intersect\" or \"crypto-calendar\"");
    }
  }
  if (j.contains("annualization")) config.annualization = j["annualization"].get<double>();
  if (!(config.annualization > 0.0)) throw ConfigError("annualization must be positive");
  if (j.contains("sampling_interval")) config.sampling_interval = j["sampling_interval"].get<double>();
  if (!(config.sampling_interval > 0.0)) throw ConfigError("sampling_interval must be positive");

  if (j.contains("filter_scope")) {
    const std::string scope = j["filter_scope"].get<std::string>();
    if (scope == "full-sample") {
      config.filter_scope = FilterScope::FullSample;
    } else if (scope == "per-year") {
      config.filter_scope = FilterScope::PerYear;
    } else {
      throw ConfigError("filter_scope must be \"full-sample\" or \"per-year\"");
    }
  }
  if (j.contains("q_override") && !j["q_override"].is_null()) {
    const auto q = j["q_override"].get<std::int64_t>();
    if (q < 1) throw ConfigError("q_override must be >= 1");
    config.q_override = static_cast<std::size_t>(q);
  }

  if (j.contains("baseline_assets")) {
    config.baseline_assets = parse_string_array(j["baseline_assets"], "baseline_assets");
    require_subset(config.baseline_assets, tags, "baseline_assets");
    if (config.baseline_assets.size() < 2) {
      throw ConfigError("baseline_assets needs at least 2 entries when given");
    }
  }
  if (j.contains("key_assets")) {
    config.key_assets = parse_string_array(j["key_assets"], "key_assets");
    require_subset(config.key_assets, tags, "key_assets");
  }
  if (j.contains("cusum_targets")) {
    config.cusum_targets = parse_string_array(j["cusum_targets"], "cusum_targets");
    require_subset(config.cusum_targets, tags, "cusum_targets");
  }

  if (j.contains("cusum_windows")) {
    if (!j["cusum_windows"].is_array()) throw ConfigError("cusum_windows must be an array");
    std::set<std::string> labels;
    for (const auto& item : j["cusum_windows"]) {
      reject_unknown_keys(item, {"label", "start", "end"}, "cusum_windows entry");
      WindowSpec w;
      w.label = item.value("label", "");
      if (w.label.empty()) throw ConfigError("cusum window without a label");
      if (!labels.insert(w.label).second) {
        throw ConfigError("duplicate cusum window label '" + w.label + "'");
      }
      w.range = DateRange{parse_config_date(item.at("start"), "cusum_windows.start"),
                          parse_config_date(item.at("end"), "cusum_windows.end")};
      if (w.range.empty()) throw ConfigError("cusum window '" + w.label + "' is empty");
      if (!config.range.contains(w.range.start) || !config.range.contains(w.range.end)) {
        throw ConfigError("cusum window '" + w.label + "' lies outside the analysis range");
      }
      config.cusum_windows.push_back(std::move(w));
    }
  }

  if (j.contains("filter_states")) {
    config.filter_states.clear();
    for (const auto& s : parse_string_array(j["filter_states"], "filter_states")) {
      const FilterState state = parse_filter_state(s, "filter_states");
      if (std::find(config.filter_states.begin(), config.filter_states.end(), state) !=
          config.filter_states.end()) {
        throw ConfigError("duplicate filter state '" + s + "'");
      }
      config.filter_states.push_back(state);
    }
    if (config.filter_states.empty()) throw ConfigError("filter_states cannot be empty");
  }

  if (j.contains("ols_boundary")) {
    config.ols_boundary = parse_boundary(j["ols_boundary"], config.ols_boundary, "ols_boundary");
  }
  if (config.ols_boundary.kind != BoundaryKind::OlsConst &&
      config.ols_boundary.kind != BoundaryKind::OlsSd) {
    throw ConfigError("ols_boundary.kind must be ols-const or ols-sd");
  }
  if (j.contains("rec_boundary")) {
    config.rec_boundary = parse_boundary(j["rec_boundary"], config.rec_boundary, "rec_boundary");
  }
  if (config.rec_boundary.kind != BoundaryKind::RecLinear &&
      config.rec_boundary.kind != BoundaryKind::RecSd) {
    throw ConfigError("rec_boundary.kind must be rec-linear or rec-sd");
  }

  if (j.contains("dtw_plot_pair")) {
    const auto pair = parse_string_array(j["dtw_plot_pair"], "dtw_plot_pair");
    if (pair.size() != 2 || pair[0] == pair[1]) {
      throw ConfigError("dtw_plot_pair must name two distinct assets");
    }
    require_subset(pair, tags, "dtw_plot_pair");
    config.dtw_plot_pair = {pair[0], pair[1]};
  }
  if (j.contains("dtw_standardize")) config.dtw_standardize = j["dtw_standardize"].get<bool>();

  if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("offline")) config.offline = j["offline"].get<bool>();
  if (j.contains("cache_dir")) config.cache_dir = j["cache_dir"].get<std::string>();
  if (j.contains("plots")) config.plots = j["plots"].get<bool>();

  if (j.contains("api")) {
    const auto& api = j["api"];
    reject_unknown_keys(api, {"base_url", "path", "currency", "api_key_env"}, "api");
    config.endpoint.base_url = api.value("base_url", config.endpoint.base_url);
    config.endpoint.path = api.value("path", config.endpoint.path);
    config.endpoint.currency = api.value("currency", config.endpoint.currency);
    config.endpoint.api_key_env = api.value("api_key_env", config.endpoint.api_key_env);
  }
  for (const auto& src : config.assets) {
    if (src.kind == AssetSource::Kind::Api && config.endpoint.base_url.empty() &&
        !config.offline) {
      throw ConfigError("api asset '" + src.tag +
                        "' needs api.base_url (or offline mode with a warm cache)");
    }
  }
  return config;
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string PipelineConfig::canonical_json() const {
  json j;
  json assets = json::array();
  for (const auto& src : this->assets) {
    assets.push_back(json{{"tag", src.tag},
                          {"source", src.kind == AssetSource::Kind::Csv ? "csv" : "api"},
                          {"location", src.location},
                          {"date_column", src.schema.date_column},
                          {"price_column", src.schema.price_column}});
  }
  j["assets"] = std::move(assets);
  j["range"] = {{"start", range.start.iso()}, {"end", range.end.iso()}};
  j["alignment"] = to_cstr(alignment);
  j["annualization"] = annualization;
  j["sampling_interval"] = sampling_interval;
  j["filter_scope"] = to_cstr(filter_scope);
  j["q_override"] = q_override ? json(*q_override) : json(nullptr);
  j["baseline_assets"] = baseline_assets;
  j["key_assets"] = key_assets;
  j["cusum_targets"] = cusum_targets;
  json windows = json::array();
  for (const auto& w : cusum_windows) {
    windows.push_back(json{{"label", w.label},
                           {"start", w.range.start.iso()},
                           {"end", w.range.end.iso()}});
  }
  j["cusum_windows"] = std::move(windows);
  json states = json::array();
  for (const FilterState s : filter_states) states.push_back(to_string(s));
  j["filter_states"] = std::move(states);
  j["ols_boundary"] = boundary_json(ols_boundary);
  j["rec_boundary"] = boundary_json(rec_boundary);
  j["dtw_plot_pair"] = dtw_plot_pair;
  j["dtw_standardize"] = dtw_standardize;
  j["output_dir"] = output_dir.generic_string();
  j["seed"] = seed;
  j["offline"] = offline;
  j["api"] = {{"base_url", endpoint.base_url},
              {"path", endpoint.path},
              {"currency", endpoint.currency},
              {"api_key_env", endpoint.api_key_env}};
  j["cache_dir"] = cache_dir.generic_string();
  j["plots"] = plots;
  j["stages"] = stages;
  return j.dump();
}

std::string PipelineConfig::hash() const { return fnv1a64_hex(canonical_json()); }

// ---------------------------------------------------------------------------
// Dataset assembly

std::vector<AssembledAsset> assemble_assets(
    const PipelineConfig& config, const std::function<void(const std::string&)>& on_asset) {
  std::vector<AssembledAsset> out;
  std::optional<MarketDataClient> client;
  for (const auto& src : config.assets) {
    if (on_asset) on_asset(src.tag);
    AssembledAsset asset;
    asset.tag = src.tag;
    if (src.kind == AssetSource::Kind::Csv) {
      const PriceSeries full = load_price_csv(src.location, src.schema, src.tag);
      std::vector<PricePoint> kept;
      for (const auto& obs : full.observations()) {
        if (config.range.contains(obs.date)) kept.push_back(obs);
      }
      asset.prices = PriceSeries(src.tag, std::move(kept));
    } else {
      if (!client) client.emplace(config.endpoint, config.cache_dir, config.offline);
      FetchOutcome outcome = client->fetch_daily_history(src.location, config.range);
      asset.prices = PriceSeries(src.tag, outcome.series.observations());
      asset.missing_days = std::move(outcome.missing_days);
      asset.from_cache = outcome.from_cache;
    }
    out.push_back(std::move(asset));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

ReportBundle run_pipeline(const PipelineConfig& config) {
  ReportBundle bundle;
  bundle.output_dir = config.output_dir;
  bundle.config_hash = config.hash();

  std::string stage = "setup";
  std::string subject;
  const auto at = [&](const std::string& s, const std::string& who = "") {
    stage = s;
    subject = who;
  };

  try {
    ArtifactSink sink(config.output_dir, bundle.artifacts);

    at("assemble");
    const std::vector<AssembledAsset> assembled =
        assemble_assets(config, [&](const std::string& tag) { at("assemble", tag); });

    at("returns");
    std::vector<ReturnSeries> returns;
    returns.reserve(assembled.size());
    for (const auto& asset : assembled) {
      at("returns", asset.tag);
      returns.push_back(to_returns(asset.prices, config.annualization));
    }

    if (config.stages & kStageStats) {
      at("stats");
      std::vector<std::pair<std::string, StatsSummary>> annualized;
      for (std::size_t i = 0; i < assembled.size(); ++i) {
        at("stats", assembled[i].tag);
        const ReturnSeries daily = to_returns(assembled[i].prices, 1.0);
        bundle.daily_stats.emplace_back(assembled[i].tag, describe(daily));
        annualized.emplace_back(assembled[i].tag, describe(returns[i]));
      }
      at("stats");
      sink.write("stats/descriptive_daily.csv", stats_csv(bundle.daily_stats));
      sink.write("stats/descriptive_annualized.csv", stats_csv(annualized));
    }

    at("align");
    const AlignedPanel panel_pre = align_panel(returns, config.alignment);
    bundle.assets = panel_pre.assets();

    const bool wants_post =
        std::find(config.filter_states.begin(), config.filter_states.end(),
                  FilterState::Post) != config.filter_states.end();
    const bool needs_post =
        (config.stages & kStageFilter) ||
        (wants_post &&
         (config.stages & (kStageSpectrum | kStageCorrelate | kStageDtw | kStageCusum)));

    AlignedPanel panel_post;
    if (needs_post) {
      at("filter");
      panel_post = filtered_panel(panel_pre, config.filter_scope, config.q_override);
    }
    const auto panel_for = [&](FilterState state) -> const AlignedPanel& {
      return state == FilterState::Pre ? panel_pre : panel_post;
    };

    if (config.stages & kStageFilter) {
      at("filter");
      for (std::size_t c = 0; c < panel_pre.cols(); ++c) {
        const std::string& tag = panel_pre.assets()[c];
        at("filter", tag);
        std::ostringstream out;
        out << "date,raw_return,filtered_return\n";
        for (std::size_t r = 0; r < panel_pre.rows(); ++r) {
          const auto er = static_cast<Eigen::Index>(r);
          const auto ec = static_cast<Eigen::Index>(c);
          out << panel_pre.dates()[r].iso() << "," << format_double(panel_pre.matrix()(er, ec))
              << "," << format_double(panel_post.matrix()(er, ec)) << "\n";
        }
        sink.write("filtered/" + tag + ".csv", out.str());
      }
    }

    if (config.stages & kStageSpectrum) {
      for (const FilterState state : config.filter_states) {
        const AlignedPanel& panel = panel_for(state);
        for (std::size_t c = 0; c < panel.cols(); ++c) {
          const std::string& tag = panel.assets()[c];
          at("spectrum", tag + " (" + to_string(state) + ")");
          const std::vector<double> column = panel.column(c);
          SpectrumDensity density = psd(column, config.sampling_interval);
          std::ostringstream out;
          out << "frequency,density\n";
          for (std::size_t k = 0; k < density.one_sided_bins(); ++k) {
            out << format_double(density.frequencies[k]) << ","
                << format_double(density.density[k]) << "\n";
          }
          sink.write("spectra/" + tag + "_" + to_string(state) + ".csv", out.str());
          bundle.spectra.push_back(SpectrumEntry{tag, state, std::move(density)});
        }
      }
    }

    const std::vector<int> years = panel_pre.years();

    if (config.stages & kStageCorrelate) {
      for (const int year : years) {
        for (const FilterState state : config.filter_states) {
          const std::string label = std::to_string(year);
          at("correlate", label + " (" + to_string(state) + ")");
          CorrelationMatrix matrix =
              correlation_matrix(panel_for(state), year_range(year), label, state);
          const std::string base = "correlation/corr_" + label + "_" + to_string(state);
          sink.write(base + ".csv", matrix_csv(matrix.assets, matrix.values));
          json jm{{"assets", matrix.assets},
                  {"period", matrix.period},
                  {"filter_state", to_string(matrix.filter_state)},
                  {"values", matrix_values_json(matrix.values)},
                  {"degenerate_pairs", matrix.degenerate_pairs}};
          sink.write(base + ".json", jm.dump(2) + "\n");
          bundle.correlations.push_back(std::move(matrix));
        }
      }
    }

    if (config.stages & (kStageDtw | kStagePlots)) {
      std::vector<std::string> baseline = config.baseline_assets;
      if (baseline.empty()) {
        bool defaults_present = true;
        for (const auto& tag : default_key_assets()) {
          defaults_present = defaults_present && panel_pre.has_asset(tag);
        }
        baseline = defaults_present ? default_key_assets() : panel_pre.assets();
      }
      std::array<std::string, 2> pair = config.dtw_plot_pair;
      if (pair[0].empty() && baseline.size() >= 2) pair = {baseline[0], baseline[1]};

      for (const int year : years) {
        for (const FilterState state : config.filter_states) {
          const std::string label = std::to_string(year);
          at("dtw", label + " (" + to_string(state) + ")");
          AlignedPanel slice = panel_for(state).slice(year_range(year));
          if (config.dtw_standardize) slice = standardize_columns(slice);

          if (config.stages & kStageDtw) {
            DtwMatrix matrix = dtw_matrix(slice, baseline, year_range(year), label, state);
            const std::string base = "dtw/dtw_" + label + "_" + to_string(state);
            sink.write(base + ".csv", matrix_csv(matrix.assets, matrix.values));
            json jm{{"assets", matrix.assets},
                    {"period", matrix.period},
                    {"filter_state", to_string(matrix.filter_state)},
                    {"baseline_assets", baseline},
                    {"baseline_max", matrix.baseline_max},
                    {"values", matrix_values_json(matrix.values)}};
            sink.write(base + ".json", jm.dump(2) + "\n");
            bundle.dtw_matrices.push_back(std::move(matrix));
          }

          if ((config.stages & kStagePlots) && config.plots && !pair[0].empty()) {
            if (slice.has_asset(pair[0]) && slice.has_asset(pair[1])) {
              DtwAlignmentEntry entry;
              entry.asset_x = pair[0];
              entry.asset_y = pair[1];
              entry.period = label;
              entry.state = state;
              entry.x = slice.column(pair[0]);
              entry.y = slice.column(pair[1]);
              entry.path = dtw(entry.x, entry.y).path;
              bundle.dtw_alignments.push_back(std::move(entry));
            } else {
              bundle.skipped_plots.push_back("dtw alignment " + pair[0] + "/" + pair[1] +
                                             " " + label + ": asset not in panel");
            }
          }
        }
      }
    }

    if (config.stages & kStageCusum) {
      const std::vector<std::string> targets =
          config.cusum_targets.empty() ? panel_pre.assets() : config.cusum_targets;
      json records = json::array();
      for (const auto& target : targets) {
        for (const FilterState state : config.filter_states) {
          at("cusum", target + " ols (" + to_string(state) + ")");
          const RegressionDesign design =
              build_design(panel_for(state), target, config.key_assets);
          const RegressionFit fit = ols_fit(design);
          CusumPath path = ols_cusum(fit);
          Boundary boundary = make_boundary(config.ols_boundary, path.taus);
          CusumOutcome outcome = cusum_test(std::move(path), std::move(boundary));

          CusumRecord record{target,
                             "full",
                             state,
                             CusumKind::Ols,
                             config.ols_boundary,
                             outcome.sup_statistic,
                             outcome.crossed,
                             outcome.first_crossing_tau};
          records.push_back(cusum_record_json(record));
          sink.write("cusum/" + target + "_full_" + to_string(state) + "_ols_path.csv",
                     cusum_csv(outcome));
          bundle.cusum.push_back(CusumEntry{std::move(record), std::move(outcome)});
        }
        for (const auto& window : config.cusum_windows) {
          for (const FilterState state : config.filter_states) {
            at("cusum", target + " rec " + window.label + " (" + to_string(state) + ")");
            const AlignedPanel slice = panel_for(state).slice(window.range);
            const RegressionDesign design = build_design(slice, target, config.key_assets);
            const RecursiveResiduals residuals = recursive_residuals(design);
            if (residuals.start_shifted) {
              std::cerr << "stabkit: warning: singular leading moment matrix for " << target
                        << " (" << window.label << ", " << to_string(state)
                        << "); recursive residuals start at row " << residuals.start_row
                        << "\n";
            }
            const double sigma = sample_sd(residuals.values);
            CusumPath path = rec_cusum(residuals, sigma);
            Boundary boundary = make_boundary(config.rec_boundary, path.taus);
            CusumOutcome outcome = cusum_test(std::move(path), std::move(boundary));

            CusumRecord record{target,
                               window.label,
                               state,
                               CusumKind::Recursive,
                               config.rec_boundary,
                               outcome.sup_statistic,
                               outcome.crossed,
                               outcome.first_crossing_tau};
            records.push_back(cusum_record_json(record));
            sink.write("cusum/" + target + "_" + sanitize_label(window.label) + "_" +
                           to_string(state) + "_rec_path.csv",
                       cusum_csv(outcome));
            bundle.cusum.push_back(CusumEntry{std::move(record), std::move(outcome)});
          }
        }
      }
      at("cusum");
      sink.write("cusum/cusum_records.json", records.dump(2) + "\n");
    }

    if ((config.stages & kStagePlots) && config.plots) {
      at("plots");
      render_plots(bundle);
    }

    at("manifest");
    write_manifest(config, bundle, std::nullopt);
    return bundle;
  } catch (const std::exception& e) {
    try {
      write_manifest(config, bundle, FailureInfo{stage, subject, e.what()});
    } catch (...) {
      // The failure manifest is best-effort; the original error wins.
    }
    throw Error("pipeline stage '" + stage + "' failed" +
                (subject.empty() ? "" : " for " + subject) + ": " + e.what());
  }
}

std::vector<ArtifactRecord> render_plots(ReportBundle& bundle) {
  std::vector<ArtifactRecord> added;
  if (bundle.spectra.empty() && bundle.cusum.empty() && bundle.dtw_alignments.empty()) {
    return added;
  }
  std::error_code ec;
  std::filesystem::create_directories(bundle.output_dir / "plots", ec);

  const auto emit = [&](const std::string& rel_path, const auto& draw) {
    try {
      draw(bundle.output_dir / rel_path);
      ArtifactRecord record = record_file(bundle.output_dir, rel_path);
      bundle.artifacts.push_back(record);
      added.push_back(std::move(record));
    } catch (const std::exception& e) {
      bundle.skipped_plots.push_back(rel_path + ": " + e.what());
    }
  };

  for (const auto& entry : bundle.spectra) {
    const std::string rel = "plots/psd_" + entry.asset + "_" + to_string(entry.state) + ".svg";
    emit(rel, [&](const std::filesystem::path& file) {
      write_psd_svg(file, entry.density,
                    entry.asset + " periodogram (" + to_string(entry.state) + ")");
    });
  }
  for (const auto& entry : bundle.cusum) {
    const auto& r = entry.record;
    const std::string rel = "plots/cusum_" + r.target + "_" + sanitize_label(r.window) + "_" +
                            to_string(r.filter_state) + "_" +
                            (r.kind == CusumKind::Ols ? "ols" : "rec") + ".svg";
    emit(rel, [&](const std::filesystem::path& file) {
      write_cusum_svg(file, entry.outcome,
                      r.target + " " + (r.kind == CusumKind::Ols ? "OLS" : "Rec") +
                          "-CUSUM " + r.window + " (" + to_string(r.filter_state) + ")");
    });
  }
  for (const auto& entry : bundle.dtw_alignments) {
    const std::string rel = "plots/dtw_" + entry.asset_x + "_" + entry.asset_y + "_" +
                            sanitize_label(entry.period) + "_" + to_string(entry.state) + ".svg";
    emit(rel, [&](const std::filesystem::path& file) {
      write_dtw_alignment_svg(file, entry.x, entry.y, entry.path, entry.asset_x, entry.asset_y,
                              "DTW alignment " + entry.asset_x + " vs " + entry.asset_y + ", " +
                                  entry.period + " (" + to_string(entry.state) + ")");
    });
  }
  return added;
}

}  // namespace stabkit
