// epf: command-line front end for the forecasting pipeline.

#include "epf/cli/commands.hpp"
#include "epf/errors.hpp"
#include "epf/models/registry.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <typeinfo>

namespace {

using namespace epf;
namespace fs = std::filesystem;

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const RegistryError*>(&e)) return "RegistryError";
    if (dynamic_cast<const FeasibilityError*>(&e)) return "FeasibilityError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
    if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const OrderingError*>(&e)) return "OrderingError";
    if (dynamic_cast<const IncompleteError*>(&e)) return "IncompleteError";
    if (dynamic_cast<const DataError*>(&e)) return "DataError";
    if (dynamic_cast<const TrainingError*>(&e)) return "TrainingError";
    if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
    if (dynamic_cast<const DegenerateError*>(&e)) return "DegenerateError";
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return "FilesystemError";
    return "Error";
}

// One JSON object on stderr; the exit code mirrors the error class.
int fail(const std::string& command, const std::string& kind, ExitCode code, const std::string& message) {
    const nlohmann::json j{{"error", {{"command", command}, {"type", kind}, {"exit_code", static_cast<int>(code)},
                                      {"message", message}}}};
    std::cerr << j.dump() << '\n';
    return static_cast<int>(code);
}

void list(const cli::Written& w) {
    for (const auto& f : w.files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead electricity price forecasting: selection, training, evaluation, explanation"};
    app.require_subcommand(1);
    std::optional<std::string> out_dir;

    auto* ingest = app.add_subcommand("ingest", "clean and aggregate an hourly CSV to daily features");
    std::string hourly, ingest_out;
    ingest->add_option("--hourly", hourly, "hourly CSV")->required();
    ingest->add_option("--out", ingest_out, "daily CSV to write")->required();

    auto* synth = app.add_subcommand("synth", "write a synthetic daily fixture with planted features");
    std::uint64_t synth_seed = 0;
    std::size_t days = 400;
    std::string synth_out;
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--days", days, "number of days (>= 30)");
    synth->add_option("--out", synth_out, "daily CSV to write")->required();

    auto* select = app.add_subcommand("select", "run feature selectors on the training rows of a daily CSV");
    cli::SelectOptions select_options;
    std::string select_data, select_config;
    select->add_option("--method", select_options.methods, "pc, pso-elm, ga-elm, rfe-svr, lasso or all")->required();
    select->add_option("--data", select_data, "daily CSV")->required();
    select->add_option("--seed", select_options.seed, "selector seed");
    select->add_option("--selection", select_config, "JSON file with selector settings");
    select->add_option("--out-dir", out_dir, "output directory");

    auto* train = app.add_subcommand("train", "walk-forward training; writes model bundles");
    std::string train_config, train_models;
    train->add_option("--config", train_config, "experiment config JSON")->required();
    train->add_option("--model", train_models, "model ids, e.g. M4 or M1..M5 (default: the config's)");
    train->add_option("--out-dir", out_dir, "output directory");

    auto* evaluate = app.add_subcommand("evaluate", "repeated experiments with metrics, statistics and DM matrix");
    std::string eval_config, eval_models;
    std::optional<std::size_t> workers;
    evaluate->add_option("--config", eval_config, "experiment config JSON")->required();
    evaluate->add_option("--models", eval_models, "model ids, e.g. M0..M13 (default: the config's)");
    evaluate->add_option("--workers", workers, "worker threads");
    evaluate->add_option("--out-dir", out_dir, "output directory");

    auto* dm = app.add_subcommand("dm", "pairwise Diebold-Mariano matrix from evaluation reports");
    std::string reports;
    dm->add_option("--reports", reports, "directory searched for report.json")->required();
    dm->add_option("--out-dir", out_dir, "output directory (default: the reports directory)");

    auto* explain = app.add_subcommand("explain", "surrogate SVR and Kernel SHAP exports");
    cli::ExplainOptions explain_options;
    std::string explain_data, mask, bundle;
    explain->add_option("--data", explain_data, "daily CSV")->required();
    explain->add_option("--mask", mask, "feature mask JSON (surrogate mode)");
    explain->add_option("--background", explain_options.background, "background rows");
    explain->add_option("--coalitions", explain_options.coalitions, "coalitions per explanation");
    explain->add_option("--seed", explain_options.seed, "sampling seed");
    explain->add_option("--top", explain_options.top, "dependence exports for the top-ranked features");
    explain->add_option("--feature", explain_options.feature, "dependence export for this feature only");
    explain->add_option("--interaction", explain_options.interaction, "interaction partner for the export");
    explain->add_option("--bundle", bundle, "explain a trained model bundle instead of the surrogate");
    explain->add_option("--out-dir", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "consolidated summary of a results directory");
    std::string report_dir;
    report->add_option("--dir", report_dir, "results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(app.get_subcommands().empty() ? "epf" : app.get_subcommands().front()->get_name(),
                    "UsageError", ExitCode::kConfig, e.what());
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (*ingest) {
            list(cli::ingest(hourly, ingest_out));
        } else if (*synth) {
            list(cli::synth(synth_seed, days, synth_out));
        } else if (*select) {
            if (!select_config.empty()) select_options.selection = cli::load_config_json(select_config);
            std::vector<featsel::FeatureMask> masks;
            list(cli::select(select_data, select_options, cli::output_dir(out_dir), &masks));
            std::cout << featsel::checkmark_table(masks);
        } else if (*train) {
            auto config = cli::load_config(train_config);
            if (!train_models.empty()) config.restrict_models(models::parse_model_list(train_models));
            list(cli::train(config, cli::output_dir(out_dir, config.output_dir)));
        } else if (*evaluate) {
            auto config = cli::load_config(eval_config);
            if (!eval_models.empty()) config.restrict_models(models::parse_model_list(eval_models));
            if (workers) {
                if (*workers == 0) throw ConfigError("--workers must be positive");
                config.workers = *workers;
            }
            eval::ForecastReport result;
            list(cli::evaluate(config, cli::output_dir(out_dir, config.output_dir), &result));
            std::cout << result.stats_csv();
            std::string failed;
            for (const auto& m : result.models) {
                for (const auto& f : m.failures) failed += m.id + " seed " + std::to_string(f.seed) + ": " + f.message + "; ";
            }
            if (!failed.empty()) return fail(command, "TrainingError", ExitCode::kTraining, failed);
        } else if (*dm) {
            std::string table;
            list(cli::dm(reports, out_dir ? fs::path(*out_dir) : fs::path(reports), &table));
            std::cout << table;
        } else if (*explain) {
            if (!bundle.empty()) explain_options.bundle = bundle;
            list(cli::explain(explain_data, mask, explain_options, cli::output_dir(out_dir)));
        } else if (*report) {
            list(cli::report(report_dir));
        }
    } catch (const Error& e) {
        return fail(command, error_kind(e), e.exit_code(), e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(command, error_kind(e), ExitCode::kData, e.what());
    } catch (const std::exception& e) {
        return fail(command, "InternalError", static_cast<ExitCode>(1), e.what());
    }
    return 0;
}
