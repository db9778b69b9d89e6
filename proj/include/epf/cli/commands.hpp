#pragma once

#include "epf/cli/config.hpp"
#include "epf/eval/experiment.hpp"
#include "epf/featsel/mask.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace epf::cli {

namespace fs = std::filesystem;

// Writes to a sibling temporary file and renames it over `path`, creating parent directories.
void write_atomic(const fs::path& path, const std::string& content);

// Explicit directory, else the config's output_dir, else $EPF_OUT_DIR, else "epf_out".
fs::path output_dir(const std::optional<std::string>& flag, const std::optional<std::string>& configured = {});

struct Written {
    std::vector<fs::path> files;
};

Written ingest(const fs::path& hourly_csv, const fs::path& out_csv);

// Daily CSV plus "<out>.meta.json" describing the planted features.
Written synth(std::uint64_t seed, std::size_t days, const fs::path& out_csv);

struct SelectOptions {
    std::vector<std::string> methods;  // "all" expands to the five selectors
    std::uint64_t seed = 0;
    nlohmann::json selection = nlohmann::json::object();  // SelectorConfig overrides
};

/// Runs selectors on the training part (first 80 %) of a daily CSV.
/// Writes mask_<method>.json per method and selection_table.txt.
Written select(const fs::path& data_csv, const SelectOptions& options, const fs::path& out_dir,
               std::vector<featsel::FeatureMask>* masks = nullptr);

/// Walk-forward training for every configured model and seed. Writes
/// bundles/<id>_seed<k>_fold<j>.json and train_summary.json.
Written train(const ExperimentConfig& config, const fs::path& out_dir);

/// Ten-experiment protocol (one run per configured seed). Writes
/// report.json (resolved config, per-run metrics, stats, DM matrix,
/// forecasts), stats.csv, runs.csv, predictions.csv and dm.csv.
/// Models are spread over `config.workers` threads; results merge in model order.
Written evaluate(const ExperimentConfig& config, const fs::path& out_dir, eval::ForecastReport* report = nullptr);

/// Pairwise DM matrix from every report.json under `reports_dir` (models
/// must share test rows). Writes dm.csv and dm.json into `out_dir`.
Written dm(const fs::path& reports_dir, const fs::path& out_dir, std::string* table = nullptr);

struct ExplainOptions {
    std::string target = "target";
    std::size_t background = 100;
    std::size_t coalitions = 2048;
    std::uint64_t seed = 0;
    std::size_t top = 3;  // dependence exports for the top-ranked features
    std::optional<std::string> feature;
    std::optional<std::string> interaction;
    std::optional<fs::path> bundle;  // explain a trained bundle instead of the surrogate
};

/// Surrogate SVR fitted on the training part of a daily CSV, explained with
/// Kernel SHAP on the test part. With options.bundle the trained model is
/// explained instead and `mask_json` may be empty. Writes surrogate.json, ranking.json,
/// shap_values.csv and dependence_<feature>.csv.
Written explain(const fs::path& data_csv, const fs::path& mask_json, const ExplainOptions& options,
                const fs::path& out_dir);

// summary.json and summary.csv from the artifacts found in `dir`.
Written report(const fs::path& dir);

}  // namespace epf::cli
