#pragma once

#include "epf/dataio/table.hpp"
#include "epf/eval/metrics.hpp"
#include "epf/models/pipeline.hpp"
#include "epf/models/registry.hpp"
#include "epf/splits/splits.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace epf::cli {

// Either a daily CSV or a synthetic fixture.
struct DataSource {
    std::string path;                        // as written in the config
    std::filesystem::path resolved_path;     // relative paths resolve against the config file
    std::optional<std::uint64_t> synth_seed;
    std::size_t synth_days = 0;

    dataio::TimeSeriesTable load() const;
};

/// Experiment description. Accepted keys:
///   data        {"path": "daily.csv"} or {"synth": {"seed": S, "days": N}}
///   models      "M0..M13" or an array of ids and/or full model specs
///   seeds       non-empty array of integers
///   split       {"validation_days": 20, "test_days": 10}
///   sizing      "full", "desk" or a partial sizing object
///   overrides   partial {"sizing", "train", "selection", "narmax"} applied to every model
///   pipeline    {"target", "retrain_every", "warm_start"}
///   metrics     {"mape", "tolerate_zeros"}
///   output_dir  default output directory
///   workers     evaluation threads
/// Unknown keys throw ConfigError; unknown model ids throw RegistryError.
struct ExperimentConfig {
    DataSource data;
    std::vector<models::ModelSpec> models;
    std::vector<std::uint64_t> seeds;
    std::size_t validation_days = 20;
    std::size_t test_days = 10;
    models::PipelineOptions pipeline;
    eval::MetricOptions metrics;
    std::optional<std::string> output_dir;
    std::size_t workers = 1;

    splits::SplitPlan plan(std::size_t rows) const;
    // Keeps only the listed ids (registry order of the list), building any not configured.
    void restrict_models(const std::vector<std::string>& ids);

    /// Everything that determines results: data, fully expanded model specs,
    /// seeds, split, pipeline and metric options. Output location and worker
    /// count are excluded. Parsing this document yields the same config.
    nlohmann::json resolved() const;
};

// Parses a JSON file; unreadable or malformed files throw ConfigError.
nlohmann::json load_config_json(const std::filesystem::path& path);

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace epf::cli
