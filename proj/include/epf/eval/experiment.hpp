#pragma once

#include "epf/eval/dm.hpp"
#include "epf/eval/metrics.hpp"
#include "epf/eval/stats.hpp"
#include "epf/models/pipeline.hpp"

#include <functional>
#include <map>

namespace epf::eval {

struct RunRecord {
    std::uint64_t seed = 0;
    MetricReport metrics;
    std::vector<double> predicted;
};

struct RunFailure {
    std::uint64_t seed = 0;
    std::string message;
};

struct ExperimentResult {
    std::string id;
    std::string name;
    std::vector<std::size_t> rows;   // test rows, in fold order
    std::vector<std::string> dates;  // of those rows
    std::vector<double> actual;
    std::vector<RunRecord> runs;     // successful runs in seed order
    std::vector<RunFailure> failures;
    std::map<std::string, ExperimentStats> stats;  // mae, rmse, mape, smape over runs

    // Per-row mean over successful runs; empty when every run failed.
    std::vector<double> mean_prediction() const;
};

struct ExperimentOptions {
    std::size_t experiments = 10;
    std::uint64_t base_seed = 0;
    // When non-empty, replaces base_seed .. base_seed + experiments - 1.
    std::vector<std::uint64_t> seeds;
    models::PipelineOptions pipeline;
    MetricOptions metrics;
    // Called with each finished walk-forward run (e.g. to persist its bundles).
    std::function<void(models::ModelRun&)> on_run;
};

/// Runs the walk-forward pipeline once per seed, in seed-list order.
/// A run that throws is recorded in `failures` and the rest continue.
ExperimentResult run_experiments(const models::ModelSpec& spec, const dataio::TimeSeriesTable& table,
                                 const splits::SplitPlan& plan, const ExperimentOptions& options = {});

struct ForecastReport {
    std::vector<ExperimentResult> models;
    DmMatrix dm;
    nlohmann::json config;

    // model,metric,count,mean,std,min,25%,50%,75%,max
    std::string stats_csv() const;
    // model,seed,mae,rmse,mape,smape,n
    std::string runs_csv() const;
    // row,date,actual,<model mean forecasts...>
    std::string predictions_csv() const;
    nlohmann::json to_json() const;
};

/// DM matrix over models with at least one successful run, using the errors
/// of each model's mean forecast across experiments.
ForecastReport build_report(std::vector<ExperimentResult> results, nlohmann::json config = nlohmann::json::object());

}  // namespace epf::eval
