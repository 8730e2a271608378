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

// stabkit command line: subcommands for each analysis stage plus `report`
// for the full pipeline. Flags override config fields (--out, --seed,
// --offline); everything else lives in the JSON config.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabkit/errors.hpp"
#include "stabkit/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

fs::path resolve_against(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  bool offline = false;
};

stabkit::PipelineConfig load_config(const CliOptions& opts, unsigned stages) {
  stabkit::PipelineConfig config = stabkit::PipelineConfig::from_json_file(opts.config_path);

  // Relative paths in the config are relative to the config file itself.
  const fs::path base = fs::path(opts.config_path).parent_path();
  for (auto& asset : config.assets) {
    if (asset.kind == stabkit::AssetSource::Kind::Csv) {
      asset.location = resolve_against(base, asset.location).string();
    }
  }
  config.cache_dir = resolve_against(base, config.cache_dir);
  config.output_dir = resolve_against(base, config.output_dir);

  if (!opts.out_override.empty()) config.output_dir = opts.out_override;
  if (opts.seed_override >= 0) config.seed = static_cast<std::uint64_t>(opts.seed_override);
  if (opts.offline) config.offline = true;
  config.stages = stages;
  return config;
}

int run_stages(const CliOptions& opts, unsigned stages) {
  const stabkit::PipelineConfig config = load_config(opts, stages);
  const stabkit::ReportBundle bundle = stabkit::run_pipeline(config);
  std::cout << "wrote " << bundle.artifacts.size() << " artifact(s) under "
            << bundle.output_dir.string() << " (config " << bundle.config_hash << ")\n";
  for (const auto& skipped : bundle.skipped_plots) {
    std::cout << "skipped plot: " << skipped << "\n";
  }
  return 0;
}

int run_fetch(const CliOptions& opts) {
  const stabkit::PipelineConfig config = load_config(opts, 0);
  const auto assembled = stabkit::assemble_assets(config);
  for (const auto& asset : assembled) {
    std::cout << asset.tag << ": " << asset.prices.size() << " rows";
    if (asset.from_cache) std::cout << " (cache)";
    if (!asset.missing_days.empty()) {
      std::cout << ", " << asset.missing_days.size() << " missing day(s)";
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabkit: log returns, spectra, low-frequency filtering, correlation, "
               "DTW and CUSUM stability tests over daily price histories"};
  app.require_subcommand(1);

  CliOptions opts;

  struct SubSpec {
    const char* name;
    const char* help;
    unsigned stages;
  };
  const std::vector<SubSpec> subs = {
      {"fetch", "Assemble price histories (network or cache) and report row counts", 0},
      {"filter", "Write per-asset raw vs low-frequency-filtered return series", stabkit::kStageFilter},
      {"spectrum", "Write periodogram CSVs per asset and filter state", stabkit::kStageSpectrum},
      {"correlate", "Write yearly correlation matrices per filter state", stabkit::kStageCorrelate},
      {"dtw", "Write yearly normalized DTW distance matrices per filter state", stabkit::kStageDtw},
      {"cusum", "Write CUSUM verdicts and fluctuation-process paths", stabkit::kStageCusum},
      {"report", "Run the full pipeline: stats, filter, spectra, correlation, DTW, CUSUM, plots",
       stabkit::kStageAll},
  };

  for (const auto& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", opts.config_path, "JSON pipeline configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_override, "Override the configured output directory");
    sub->add_option("--seed", opts.seed_override, "Override the configured random seed");
    sub->add_flag("--offline", opts.offline, "Never touch the network; cache misses fail");
    const unsigned stages = spec.stages;
    const std::string name = spec.name;
    sub->callback([&opts, stages, name]() {
      if (name == "fetch") {
        run_fetch(opts);
      } else {
        run_stages(opts, stages);
      }
    });
  }

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const stabkit::Error& e) {
    std::cerr << "stabkit: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
