#pragma once

#include "epf/dataio/normalize.hpp"
#include "epf/featsel/mask.hpp"
#include "epf/models/registry.hpp"
#include "epf/splits/splits.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace epf::models {

struct PipelineOptions {
    std::string target = "target";
    // Retrain on folds 0, r, 2r, ...; other folds reuse the latest bundle.
    std::size_t retrain_every = 1;
    // Start each retraining from the previous bundle's parameters.
    bool warm_start = false;
};

nlohmann::json to_json(const PipelineOptions& options);
PipelineOptions pipeline_options_from_json(const nlohmann::json& j);

// Streams derived from (experiment seed, fold); the model id is not mixed in,
// so models sharing a selector see the same mask on the same fold.
numkernel::Rng selector_rng(std::uint64_t seed, std::size_t fold);
std::uint64_t training_seed(std::uint64_t seed, std::size_t fold);

/// Everything needed to forecast from raw (unnormalized) rows.
struct ModelBundle {
    ModelSpec spec;
    std::string target;
    featsel::FeatureMask mask;
    dataio::NormalizationParams normalizer;
    std::optional<neural::TrainedModel> network;
    std::optional<NarmaxModel> narmax;
    std::uint64_t seed = 0;
    std::size_t fold = 0;
    std::size_t trained_fold = 0;  // differs from `fold` when the bundle was reused
    double narmax_validation_mse = 0.0;

    // Rows of history consumed by one forecast.
    std::size_t history() const;

    /// Price for the day after the last row of `recent` in target units.
    /// Needs at least history() rows carrying the mask's features (and the
    /// target column for M0). Throws SchemaError on missing columns and
    /// ShapeError on short input.
    double predict(const dataio::TimeSeriesTable& recent);

    // Forecasts for every target row in `rows`, using earlier rows of `table` as history.
    std::vector<double> predict(const dataio::TimeSeriesTable& table, dataio::RowRange rows);
};

/// Fits one fold: normalizer on the fold's training rows, selector on the
/// normalized training rows, then the network (or NARMAX structure search)
/// with early stopping on the validation rows. Nothing at or after
/// fold.test.begin is read, and the normalizer and mask only read fold.train.
/// Errors from selection and training are rethrown with the model id prefixed.
ModelBundle train_model(const ModelSpec& spec, const dataio::TimeSeriesTable& table, const splits::Fold& fold,
                        std::uint64_t seed, std::size_t fold_index, const PipelineOptions& options = {},
                        const ModelBundle* previous = nullptr);

struct FoldForecast {
    std::size_t fold = 0;
    std::vector<std::size_t> rows;
    std::vector<double> predicted;
    std::vector<double> actual;
};

struct ModelRun {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<ModelBundle> bundles;  // one per fold
    std::vector<FoldForecast> folds;

    // Test forecasts concatenated over folds.
    std::vector<double> predicted() const;
    std::vector<double> actual() const;
    std::vector<std::size_t> rows() const;
};

// Walks every fold of `plan` in order.
ModelRun run_model(const ModelSpec& spec, const dataio::TimeSeriesTable& table, const splits::SplitPlan& plan,
                   std::uint64_t seed, const PipelineOptions& options = {});

// {"spec", "mask", "normalizer", "parameters", "metadata"}
nlohmann::json to_json(ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& j);
// "<id>_seed<k>_fold<j>.json"
std::string bundle_file_name(std::string_view id, std::uint64_t seed, std::size_t fold);

}  // namespace epf::models
