#include "epf/models/pipeline.hpp"

#include "epf/dataio/catalog.hpp"
#include "epf/errors.hpp"
#include "epf/featsel/data.hpp"

#include <limits>

namespace epf::models {

using dataio::RowRange;
using dataio::TimeSeriesTable;

nlohmann::json to_json(const PipelineOptions& o) {
    return {{"target", o.target}, {"retrain_every", o.retrain_every}, {"warm_start", o.warm_start}};
}

PipelineOptions pipeline_options_from_json(const nlohmann::json& j) {
    PipelineOptions o;
    try {
        o.target = j.value("target", o.target);
        o.retrain_every = j.value("retrain_every", o.retrain_every);
        o.warm_start = j.value("warm_start", o.warm_start);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed pipeline options: ") + e.what());
    }
    if (o.retrain_every == 0) {
        throw ConfigError("retrain_every must be positive");
    }
    return o;
}

numkernel::Rng selector_rng(std::uint64_t seed, std::size_t fold) {
    return numkernel::Rng(seed).fork(0x5e1ec7000 + fold);
}

std::uint64_t training_seed(std::uint64_t seed, std::size_t fold) {
    return numkernel::Rng(seed).fork(0x7a1a000 + fold).next_u64();
}

namespace {

// Rethrows `fn`'s library errors with "<id>: " in front, keeping the type.
template <typename Fn>
auto tagged(const std::string& id, Fn&& fn) {
    const auto tag = [&](const std::string& m) { return id + ": " + m; };
    try {
        return fn();
    } catch (const TrainingError& e) {
        std::string m = e.what();
        const auto colon = m.find(": ");
        throw TrainingError(tag(colon == std::string::npos ? m : m.substr(colon + 2)), e.epoch());
    } catch (const SolverError& e) {
        std::string m = e.what();
        m = m.substr(0, m.rfind(" (residual "));
        throw SolverError(tag(m), e.residual());
    } catch (const DegenerateError& e) {
        throw DegenerateError(tag(e.what()));
    } catch (const RegistryError& e) {
        throw RegistryError(tag(e.what()));
    } catch (const ConfigError& e) {
        throw ConfigError(tag(e.what()));
    } catch (const ShapeError& e) {
        throw ShapeError(tag(e.what()));
    } catch (const SchemaError& e) {
        throw SchemaError(tag(e.what()));
    } catch (const DataError& e) {
        throw DataError(tag(e.what()));
    }
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dataio::kFeatureCount; ++i) names.push_back(dataio::feature_id(i));
    return names;
}

// NARMAX exogenous input aligned to the target: row t holds the features of day t-1.
Matrix lagged_features(const TimeSeriesTable& norm, std::size_t rows) {
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dataio::kFeatureCount));
    for (std::size_t j = 0; j < dataio::kFeatureCount; ++j) {
        const auto& col = norm.column(dataio::feature_id(j));
        for (std::size_t t = 1; t < rows && t - 1 < col.size(); ++t) {
            x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = col[t - 1];
        }
    }
    return x;
}

double mean_square(const std::vector<double>& a, std::span<const double> y, RowRange rows) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a[i] - y[rows.begin + i];
        s += e * e;
    }
    return a.empty() ? std::numeric_limits<double>::infinity() : s / static_cast<double>(a.size());
}

void fit_narmax(ModelBundle& b, const TimeSeriesTable& norm, const splits::Fold& fold) {
    const auto& y = norm.column(b.target);
    const Matrix x = lagged_features(norm, norm.rows());
    double best = std::numeric_limits<double>::infinity();
    for (auto lag : b.spec.narmax.lags) {
        for (auto degree : b.spec.narmax.degrees) {
            const NarmaxOrder order{lag, 1, lag, degree};
            if (fold.train.end <= order.max_lag() + 2 || fold.validation.begin < order.max_lag()) continue;
            auto model = narmax_fit(y, x, fold.train, order, b.spec.narmax.fit);
            const double score = mean_square(model.predict(y, x, fold.validation), y, fold.validation);
            if (score < best) {
                best = score;
                b.narmax = std::move(model);
            }
        }
    }
    if (!b.narmax) {
        throw DataError("narmax: no candidate structure fits the training window");
    }
    b.narmax_validation_mse = best;
}

}  // namespace

std::size_t ModelBundle::history() const {
    return narmax ? narmax->order.max_lag() : spec.sizing.window;
}

double ModelBundle::predict(const TimeSeriesTable& recent) {
    const std::size_t need = history();
    if (recent.rows() < need) {
        throw ShapeError(spec.id + ": forecast needs " + std::to_string(need) + " rows of history, got " +
                         std::to_string(recent.rows()));
    }
    // Append an empty target day so the row-range predictor can be reused.
    TimeSeriesTable extended;
    extended.granularity = recent.granularity;
    extended.stamps = recent.stamps;
    extended.stamps.push_back(recent.stamps.back());
    const auto names = narmax ? catalog_names() : mask.selected();
    std::vector<std::string> wanted = names;
    wanted.push_back(target);
    for (const auto& name : wanted) {
        const auto found = recent.find(name);
        if (!found) {
            if (name == target && !narmax) {
                extended.add_column(name, std::vector<double>(recent.rows() + 1, 0.0));
                continue;
            }
            throw SchemaError(spec.id + ": forecast input lacks column '" + name + "'");
        }
        auto col = recent.columns[*found];
        col.push_back(col.back());
        extended.add_column(name, std::move(col));
    }
    return predict(extended, {recent.rows(), recent.rows() + 1}).front();
}

std::vector<double> ModelBundle::predict(const TimeSeriesTable& table, RowRange rows) {
    if (rows.end > table.rows() || rows.begin < history()) {
        throw ShapeError(spec.id + ": forecast rows need " + std::to_string(history()) + " rows of history");
    }
    // Normalize only the columns the model reads.
    TimeSeriesTable view;
    view.granularity = table.granularity;
    view.stamps = table.stamps;
    const auto names = narmax ? catalog_names() : mask.selected();
    for (const auto& name : names) view.add_column(name, table.column(name));
    view.add_column(target, table.column(target));
    dataio::NormalizationParams params;
    for (const auto& name : view.names) {
        const auto i = normalizer.index_of(name);
        params.names.push_back(name);
        params.min.push_back(normalizer.min[i]);
        params.max.push_back(normalizer.max[i]);
        params.constant.push_back(normalizer.constant[i]);
    }
    const auto norm = dataio::apply_normalizer(view, params);
    const auto target_col = params.index_of(target);

    std::vector<double> out;
    if (narmax) {
        out = narmax->predict(norm.column(target), lagged_features(norm, norm.rows()), rows);
    } else {
        const auto windows = splits::select_targets(
            splits::windowize(norm, names, target, spec.sizing.window), rows);
        out = network->predict(windows);
    }
    for (auto& v : out) v = params.invert(target_col, v);
    return out;
}

ModelBundle train_model(const ModelSpec& spec, const TimeSeriesTable& table, const splits::Fold& fold,
                        std::uint64_t seed, std::size_t fold_index, const PipelineOptions& options,
                        const ModelBundle* previous) {
    return tagged(spec.id, [&] {
        if (fold.test.begin > table.rows() || fold.validation.end > fold.test.begin) {
            throw ShapeError("fold does not fit the table");
        }
        // Rows from the test block on are never read.
        const auto visible = dataio::slice_rows(table, {0, fold.test.begin});
        ModelBundle b;
        b.spec = spec;
        b.target = options.target;
        b.seed = seed;
        b.fold = b.trained_fold = fold_index;
        b.normalizer = dataio::fit_normalizer(visible, fold.train);
        const auto norm = dataio::apply_normalizer(visible, b.normalizer);

        if (spec.selector == featsel::Selector::kNone) {
            b.mask = featsel::FeatureMask::all("none");
        } else {
            const auto data = featsel::SelectionData::from_table(norm, fold.train, options.target);
            auto rng = selector_rng(seed, fold_index);
            b.mask = featsel::select_features(spec.selector, data, spec.selection, rng);
        }

        if (!spec.uses_network()) {
            fit_narmax(b, norm, fold);
            return b;
        }
        const auto features = b.mask.selected();
        const auto all = splits::windowize(norm, features, options.target, spec.sizing.window);
        const auto train_data = splits::select_targets(all, fold.train);
        const auto validation = splits::select_targets(all, fold.validation);
        auto config = spec.train;
        config.seed = training_seed(seed, fold_index);
        std::vector<double> initial;
        if (options.warm_start && previous && previous->network) {
            auto start = previous->network->network;
            initial = start.flat_parameters();
        }
        b.network = neural::train(spec.network(features.size()), train_data, validation, config, initial);
        return b;
    });
}

std::vector<double> ModelRun::predicted() const {
    std::vector<double> out;
    for (const auto& f : folds) out.insert(out.end(), f.predicted.begin(), f.predicted.end());
    return out;
}

std::vector<double> ModelRun::actual() const {
    std::vector<double> out;
    for (const auto& f : folds) out.insert(out.end(), f.actual.begin(), f.actual.end());
    return out;
}

std::vector<std::size_t> ModelRun::rows() const {
    std::vector<std::size_t> out;
    for (const auto& f : folds) out.insert(out.end(), f.rows.begin(), f.rows.end());
    return out;
}

ModelRun run_model(const ModelSpec& spec, const TimeSeriesTable& table, const splits::SplitPlan& plan,
                   std::uint64_t seed, const PipelineOptions& options) {
    if (options.retrain_every == 0) {
        throw ConfigError("retrain_every must be positive");
    }
    ModelRun run;
    run.id = spec.id;
    run.seed = seed;
    const auto& actual = table.column(options.target);
    for (std::size_t j = 0; j < plan.folds.size(); ++j) {
        const auto& fold = plan.folds[j];
        if (j % options.retrain_every == 0 || run.bundles.empty()) {
            run.bundles.push_back(train_model(spec, table, fold, seed, j, options,
                                              run.bundles.empty() ? nullptr : &run.bundles.back()));
        } else {
            auto reused = run.bundles.back();
            reused.fold = j;
            run.bundles.push_back(std::move(reused));
        }
        FoldForecast f;
        f.fold = j;
        // Forecasting reads rows up to the end of this test block only.
        const auto upto = dataio::slice_rows(table, {0, fold.test.end});
        f.predicted = run.bundles.back().predict(upto, fold.test);
        for (std::size_t t = fold.test.begin; t < fold.test.end; ++t) {
            f.rows.push_back(t);
            f.actual.push_back(actual[t]);
        }
        run.folds.push_back(std::move(f));
    }
    return run;
}

nlohmann::json to_json(ModelBundle& b) {
    nlohmann::json parameters = b.narmax ? to_json(*b.narmax) : b.network->to_json();
    nlohmann::json metadata{{"seed", b.seed},
                            {"fold", b.fold},
                            {"trained_fold", b.trained_fold},
                            {"target", b.target},
                            {"features", b.mask.selected()}};
    if (b.network) {
        metadata["epochs_run"] = b.network->train_loss.size();
        metadata["best_epoch"] = b.network->best_epoch;
        metadata["train_loss"] = b.network->train_loss;
        metadata["validation_loss"] = b.network->validation_loss;
    } else {
        metadata["validation_mse"] = b.narmax_validation_mse;
    }
    return {{"spec", to_json(b.spec)},
            {"mask", featsel::to_json(b.mask)},
            {"normalizer", dataio::to_json(b.normalizer)},
            {"parameters", parameters},
            {"metadata", metadata}};
}

ModelBundle bundle_from_json(const nlohmann::json& j) {
    ModelBundle b;
    try {
        b.spec = model_spec_from_json(j.at("spec"));
        b.mask = featsel::mask_from_json(j.at("mask"));
        b.normalizer = dataio::normalization_from_json(j.at("normalizer"));
        const auto& m = j.at("metadata");
        b.seed = m.at("seed").get<std::uint64_t>();
        b.fold = m.at("fold").get<std::size_t>();
        b.trained_fold = m.value("trained_fold", b.fold);
        b.target = m.at("target").get<std::string>();
        if (b.spec.uses_network()) {
            b.network = neural::TrainedModel::from_json(j.at("parameters"));
        } else {
            b.narmax = narmax_from_json(j.at("parameters"));
            b.narmax_validation_mse = m.value("validation_mse", 0.0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model bundle: ") + e.what());
    }
    return b;
}

std::string bundle_file_name(std::string_view id, std::uint64_t seed, std::size_t fold) {
    return std::string(id) + "_seed" + std::to_string(seed) + "_fold" + std::to_string(fold) + ".json";
}

}  // namespace epf::models
