#include "epf/cli/commands.hpp"

#include "epf/dataio/csv.hpp"
#include "epf/dataio/normalize.hpp"
#include "epf/dataio/preprocess.hpp"
#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/explain/blackbox.hpp"
#include "epf/explain/surrogate.hpp"
#include "epf/featsel/select.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace epf::cli {

namespace {

constexpr const char* kSelectors[] = {"pc", "pso-elm", "ga-elm", "rfe-svr", "lasso"};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

dataio::TimeSeriesTable load_daily(const fs::path& path) {
    if (!fs::exists(path)) {
        throw DataError("data file not found: " + path.string());
    }
    return dataio::clean(dataio::load_csv(path, dataio::Granularity::kDaily));
}

// Normalized table plus the row where held-out data starts (the initial test region).
struct Prepared {
    dataio::TimeSeriesTable normalized;
    std::size_t test_begin = 0;
};

Prepared prepare(const dataio::TimeSeriesTable& table, bool fit_on_train_only) {
    const auto division = splits::initial_division(table.rows());
    const dataio::RowRange fit_rows = fit_on_train_only ? division.train : dataio::RowRange{0, division.test.begin};
    const auto params = dataio::fit_normalizer(table, fit_rows);
    return {dataio::apply_normalizer(table, params), division.test.begin};
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            fs::remove(tmp);
            throw DataError("short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

fs::path output_dir(const std::optional<std::string>& flag, const std::optional<std::string>& configured) {
    if (flag) return *flag;
    if (configured) return *configured;
    if (const char* env = std::getenv("EPF_OUT_DIR"); env && *env) return env;
    return "epf_out";
}

Written ingest(const fs::path& hourly_csv, const fs::path& out_csv) {
    if (!fs::exists(hourly_csv)) {
        throw DataError("hourly file not found: " + hourly_csv.string());
    }
    const auto hourly = dataio::clean(dataio::load_csv(hourly_csv, dataio::Granularity::kHourly));
    const auto daily = dataio::aggregate_daily(hourly, dataio::feature_catalog());
    write_atomic(out_csv, dataio::to_csv(daily));
    return {{out_csv}};
}

Written synth(std::uint64_t seed, std::size_t days, const fs::path& out_csv) {
    if (days < 30) {
        throw ConfigError("synth: --days must be at least 30");
    }
    numkernel::Rng rng(seed);
    const auto data = dataio::synth_generate(rng, days);
    fs::path meta = out_csv;
    meta += ".meta.json";
    write_atomic(out_csv, dataio::to_csv(data.table));
    write_atomic(meta, dump(dataio::metadata_json(data)));
    return {{out_csv, meta}};
}

Written select(const fs::path& data_csv, const SelectOptions& options, const fs::path& out_dir,
               std::vector<featsel::FeatureMask>* masks_out) {
    std::vector<std::string> methods;
    for (const auto& m : options.methods) {
        if (m == "all") {
            methods.insert(methods.end(), std::begin(kSelectors), std::end(kSelectors));
        } else if (std::find(std::begin(kSelectors), std::end(kSelectors), m) != std::end(kSelectors)) {
            methods.push_back(m);
        } else {
            throw ConfigError("select: unknown method '" + m + "' (pc, pso-elm, ga-elm, rfe-svr, lasso, all)");
        }
    }
    if (methods.empty()) throw ConfigError("select: no method given");
    const auto selection = featsel::selector_config_from_json(
        options.selection.is_null() ? nlohmann::json::object() : options.selection);
    const auto table = load_daily(data_csv);
    const auto prepared = prepare(table, true);
    const auto division = splits::initial_division(table.rows());
    const auto data = featsel::SelectionData::from_table(prepared.normalized, division.train, "target");

    Written w;
    std::vector<featsel::FeatureMask> masks;
    for (const auto& m : methods) {
        auto rng = models::selector_rng(options.seed, 0);
        masks.push_back(featsel::select_features(featsel::selector_from_string(m), data, selection, rng));
        const auto path = out_dir / ("mask_" + m + ".json");
        write_atomic(path, dump(featsel::to_json(masks.back())));
        w.files.push_back(path);
    }
    const auto table_path = out_dir / "selection_table.txt";
    write_atomic(table_path, featsel::checkmark_table(masks));
    w.files.push_back(table_path);
    if (masks_out) *masks_out = std::move(masks);
    return w;
}

Written train(const ExperimentConfig& config, const fs::path& out_dir) {
    const auto table = config.data.load();
    const auto plan = config.plan(table.rows());
    Written w;
    nlohmann::json bundles = nlohmann::json::array();
    for (const auto& spec : config.models) {
        for (const auto seed : config.seeds) {
            auto run = models::run_model(spec, table, plan, seed, config.pipeline);
            for (std::size_t f = 0; f < run.bundles.size(); ++f) {
                const auto name = models::bundle_file_name(spec.id, seed, f);
                const auto path = out_dir / "bundles" / name;
                write_atomic(path, dump(models::to_json(run.bundles[f])));
                w.files.push_back(path);
                bundles.push_back(name);
            }
        }
    }
    const auto summary = out_dir / "train_summary.json";
    write_atomic(summary, dump({{"config", config.resolved()}, {"plan", splits::to_json(plan)}, {"bundles", bundles}}));
    w.files.push_back(summary);
    return w;
}

Written evaluate(const ExperimentConfig& config, const fs::path& out_dir, eval::ForecastReport* report_out) {
    const auto table = config.data.load();
    const auto plan = config.plan(table.rows());
    eval::ExperimentOptions options;
    options.seeds = config.seeds;
    options.pipeline = config.pipeline;
    options.metrics = config.metrics;

    // Each worker claims whole models; slots keep registry order regardless of timing.
    std::vector<eval::ExperimentResult> results(config.models.size());
    std::vector<std::exception_ptr> errors(config.models.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < config.models.size(); i = next++) {
            try {
                results[i] = eval::run_experiments(config.models[i], table, plan, options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min(config.workers, config.models.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    auto report = eval::build_report(std::move(results), config.resolved());
    const std::pair<const char*, std::string> files[] = {
        {"report.json", dump(report.to_json())},
        {"stats.csv", report.stats_csv()},
        {"runs.csv", report.runs_csv()},
        {"predictions.csv", report.predictions_csv()},
        {"dm.csv", report.dm.to_csv()},
    };
    Written w;
    for (const auto& [name, content] : files) {
        write_atomic(out_dir / name, content);
        w.files.push_back(out_dir / name);
    }
    if (report_out) *report_out = std::move(report);
    return w;
}

Written dm(const fs::path& reports_dir, const fs::path& out_dir, std::string* table) {
    if (!fs::is_directory(reports_dir)) {
        throw DataError("dm: not a directory: " + reports_dir.string());
    }
    std::vector<fs::path> reports;
    for (const auto& entry : fs::recursive_directory_iterator(reports_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "report.json") reports.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());
    std::vector<std::string> ids;
    std::vector<std::vector<double>> errors;
    std::vector<double> reference;
    for (const auto& path : reports) {
        const auto j = read_json(path);
        try {
            for (const auto& m : j.at("models")) {
                const auto mean = m.at("mean_prediction").get<std::vector<double>>();
                if (mean.empty()) continue;
                const auto id = m.at("id").get<std::string>();
                if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
                    throw ConfigError("dm: model " + id + " appears in more than one report");
                }
                const auto actual = m.at("actual").get<std::vector<double>>();
                if (reference.empty()) reference = actual;
                if (actual != reference || mean.size() != actual.size()) {
                    throw ShapeError("dm: " + id + " was evaluated on different test rows");
                }
                std::vector<double> e(mean.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = mean[i] - actual[i];
                ids.push_back(id);
                errors.push_back(std::move(e));
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ": not a forecast report (" + e.what() + ")");
        }
    }
    if (ids.size() < 2) {
        throw DataError("dm: need forecasts from at least two models under " + reports_dir.string());
    }
    const auto matrix = eval::dm_matrix(ids, errors);
    Written w;
    write_atomic(out_dir / "dm.csv", matrix.to_csv());
    write_atomic(out_dir / "dm.json", dump(matrix.to_json()));
    w.files = {out_dir / "dm.csv", out_dir / "dm.json"};
    if (table) *table = matrix.to_csv();
    return w;
}

Written explain(const fs::path& data_csv, const fs::path& mask_json, const ExplainOptions& options,
                const fs::path& out_dir) {
    if (mask_json.empty() && !options.bundle) {
        throw ConfigError("explain: give --mask for the surrogate or --bundle for a trained model");
    }
    const auto table = load_daily(data_csv);
    const auto mask = options.bundle ? featsel::FeatureMask{} : featsel::mask_from_json(read_json(mask_json));
    const auto prepared = prepare(table, false);
    const std::size_t test_begin = prepared.test_begin;

    std::vector<explain::ShapExplanation> ex;
    std::vector<std::string> names;
    nlohmann::json model_doc;
    numkernel::Rng bg_rng(options.seed);
    auto config_for = [&](std::size_t i) {
        return explain::KernelShapConfig{options.coalitions, numkernel::Rng(options.seed).fork(i).next_u64()};
    };
    if (options.bundle) {
        auto bundle = std::make_shared<models::ModelBundle>(models::bundle_from_json(read_json(*options.bundle)));
        names = bundle->mask.selected();
        const auto h = bundle->history();
        if (test_begin < h + 1) throw ShapeError("explain: not enough history before the test rows");
        const auto bg = explain::sample_background(explain::feature_rows(table, names, {0, test_begin - 1}),
                                                   options.background, bg_rng);
        for (std::size_t t = test_begin; t < table.rows(); ++t) {
            const auto view = explain::bundle_view(bundle, dataio::slice_rows(table, {t - h, t}));
            ex.push_back(explain::kernel_shap(view.predictor, view.instance, bg, config_for(t)));
        }
        model_doc = {{"kind", "bundle"}, {"model", bundle->spec.id}, {"values", "raw"}};
    } else {
        const auto data = featsel::SelectionData::from_table(prepared.normalized, {0, table.rows()}, options.target);
        // Sample i targets row i + 1.
        const auto train = data.head(test_begin - 1);
        const auto test = data.tail_from(test_begin - 1);
        const auto model = explain::fit_surrogate_svr(train, mask);
        names = model.names;
        const auto bg = explain::sample_background(model.project(train.x), options.background, bg_rng);
        const numkernel::Matrix xt = model.project(test.x);
        const auto f = model.predictor();
        for (Eigen::Index r = 0; r < xt.rows(); ++r) {
            ex.push_back(explain::kernel_shap(f, xt.row(r).transpose(), bg, config_for(static_cast<std::size_t>(r))));
        }
        model_doc = explain::to_json(model);
        model_doc["kind"] = "surrogate-svr";
        model_doc["values"] = "normalized";
    }
    if (ex.empty()) throw ShapeError("explain: no test rows to explain");

    const auto ranking = explain::importance_ranking(ex, names);
    Written w;
    model_doc["background_rows"] = options.background;
    model_doc["coalitions"] = options.coalitions;
    model_doc["seed"] = options.seed;
    model_doc["instances"] = ex.size();
    if (!options.bundle) model_doc["mask"] = featsel::to_json(mask);
    write_atomic(out_dir / "surrogate.json", dump(model_doc));
    write_atomic(out_dir / "ranking.json", dump(explain::to_json(ranking)));

    // Beeswarm data, features in rank order.
    std::ostringstream values;
    values << "feature,value,phi\n";
    for (const auto& r : ranking) {
        for (const auto& e : ex) {
            values << r.name << ',' << dataio::format_number(e.instance(static_cast<Eigen::Index>(r.index))) << ','
                   << dataio::format_number(e.phi[r.index]) << '\n';
        }
    }
    write_atomic(out_dir / "shap_values.csv", values.str());
    w.files = {out_dir / "surrogate.json", out_dir / "ranking.json", out_dir / "shap_values.csv"};

    std::vector<std::string> features;
    if (options.feature) {
        features.push_back(*options.feature);
    } else {
        for (std::size_t k = 0; k < std::min(options.top, ranking.size()); ++k) features.push_back(ranking[k].name);
    }
    for (const auto& feature : features) {
        const auto dep = explain::dependence_export(
            ex, names, feature,
            options.interaction ? std::optional<std::string_view>(*options.interaction) : std::nullopt);
        const auto path = out_dir / ("dependence_" + feature + ".csv");
        write_atomic(path, dep.to_csv());
        w.files.push_back(path);
    }
    return w;
}

Written report(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw DataError("report: not a directory: " + dir.string());
    }
    nlohmann::json summary = nlohmann::json::object();
    std::ostringstream csv;
    csv << "model,name,runs,failures,mae_mean,rmse_mean,mape_mean,smape_mean,smape_std\n";
    bool found = false;
    if (const auto path = dir / "report.json"; fs::exists(path)) {
        found = true;
        const auto j = read_json(path);
        summary["config"] = j.value("config", nlohmann::json::object());
        nlohmann::json list = nlohmann::json::array();
        for (const auto& m : j.value("models", nlohmann::json::array())) {
            const auto& stats = m.at("stats");
            auto mean_of = [&](const char* k) -> nlohmann::json {
                return stats.contains(k) ? stats.at(k).at("mean") : nlohmann::json();
            };
            auto text = [](const nlohmann::json& v) { return v.is_number() ? dataio::format_number(v.get<double>()) : std::string(); };
            const nlohmann::json smape_std = stats.contains("smape") ? stats.at("smape").at("std") : nlohmann::json();
            nlohmann::json row{{"id", m.at("id")},          {"name", m.at("name")},
                               {"runs", m.at("runs").size()}, {"failures", m.at("failures").size()},
                               {"mae", mean_of("mae")},     {"rmse", mean_of("rmse")},
                               {"mape", mean_of("mape")},   {"smape", mean_of("smape")},
                               {"smape_std", smape_std}};
            csv << m.at("id").get<std::string>() << ',' << m.at("name").get<std::string>() << ','
                << row["runs"].get<std::size_t>() << ',' << row["failures"].get<std::size_t>() << ','
                << text(row["mae"]) << ',' << text(row["rmse"]) << ',' << text(row["mape"]) << ','
                << text(row["smape"]) << ',' << text(smape_std) << '\n';
            list.push_back(std::move(row));
        }
        summary["models"] = list;
        summary["dm"] = j.value("dm", nlohmann::json::object());
    }
    nlohmann::json masks = nlohmann::json::object();
    for (const auto* m : kSelectors) {
        if (const auto path = dir / ("mask_" + std::string(m) + ".json"); fs::exists(path)) {
            found = true;
            masks[m] = read_json(path).at("selected");
        }
    }
    if (!masks.empty()) summary["masks"] = masks;
    if (const auto path = dir / "ranking.json"; fs::exists(path)) {
        found = true;
        summary["shap_ranking"] = read_json(path);
    }
    if (!found) {
        throw DataError("report: no report.json, mask_*.json or ranking.json in " + dir.string());
    }
    write_atomic(dir / "summary.json", dump(summary));
    write_atomic(dir / "summary.csv", csv.str());
    return {{dir / "summary.json", dir / "summary.csv"}};
}

}  // namespace epf::cli
