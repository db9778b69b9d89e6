#include "epf/splits/splits.hpp"

#include "epf/errors.hpp"

#include <algorithm>

namespace epf::splits {

Division initial_division(std::size_t n_rows) {
    if (n_rows < 50) {
        throw ConfigError("initial_division: need at least 50 rows, got " + std::to_string(n_rows));
    }
    const std::size_t train = n_rows * 8 / 10;
    const std::size_t val = n_rows / 10;
    return {{0, train}, {train, train + val}, {train + val, n_rows}};
}

SplitPlan walk_forward_folds(std::size_t n_rows, std::size_t val_len, std::size_t test_len) {
    if (val_len < 1 || test_len < 1) {
        throw ConfigError("walk_forward_folds: validation and test lengths must be >= 1");
    }
    const auto division = initial_division(n_rows);
    const std::size_t first_test = division.test.begin;
    if (first_test <= val_len) {
        throw ConfigError("walk_forward_folds: validation window of " + std::to_string(val_len) +
                          " rows leaves no training rows");
    }
    SplitPlan plan;
    for (std::size_t start = first_test; start < n_rows; start += test_len) {
        Fold fold;
        fold.test = {start, std::min(start + test_len, n_rows)};
        fold.validation = {start - val_len, start};
        fold.train = {0, start - val_len};
        plan.folds.push_back(fold);
    }
    return plan;
}

namespace {

nlohmann::json range_json(RowRange r) { return nlohmann::json::array({r.begin, r.end}); }

RowRange range_from(const nlohmann::json& j) {
    return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

}  // namespace

nlohmann::json to_json(const SplitPlan& plan) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : plan.folds) {
        folds.push_back({{"train", range_json(f.train)},
                         {"val", range_json(f.validation)},
                         {"test", range_json(f.test)}});
    }
    return {{"folds", folds}};
}

SplitPlan plan_from_json(const nlohmann::json& j) {
    SplitPlan plan;
    try {
        for (const auto& f : j.at("folds")) {
            plan.folds.push_back({range_from(f.at("train")), range_from(f.at("val")), range_from(f.at("test"))});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed split plan: ") + e.what());
    }
    return plan;
}

WindowedDataset windowize(const dataio::TimeSeriesTable& table, const std::vector<std::string>& features,
                          std::string_view target_column, std::size_t window) {
    if (window < 1) {
        throw ConfigError("windowize: window must be >= 1");
    }
    if (window >= table.rows()) {
        throw ConfigError("windowize: window " + std::to_string(window) + " needs more than " +
                          std::to_string(table.rows()) + " rows");
    }
    std::vector<const std::vector<double>*> cols;
    for (const auto& name : features) {
        cols.push_back(&table.column(name));
    }
    const auto& target = table.column(target_column);

    WindowedDataset out;
    out.window = window;
    out.feature_names = features;
    const auto width = static_cast<Eigen::Index>(cols.size());
    for (std::size_t t = window; t < table.rows(); ++t) {
        numkernel::Matrix m(static_cast<Eigen::Index>(window), width);
        for (std::size_t k = 0; k < window; ++k) {
            for (Eigen::Index c = 0; c < width; ++c) {
                m(static_cast<Eigen::Index>(k), c) = (*cols[static_cast<std::size_t>(c)])[t - window + k];
            }
        }
        out.inputs.push_back(std::move(m));
        out.targets.push_back(target[t]);
        out.target_rows.push_back(t);
    }
    return out;
}

WindowedDataset select_targets(const WindowedDataset& data, RowRange rows) {
    WindowedDataset out;
    out.window = data.window;
    out.feature_names = data.feature_names;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (rows.contains(data.target_rows[i])) {
            out.inputs.push_back(data.inputs[i]);
            out.targets.push_back(data.targets[i]);
            out.target_rows.push_back(data.target_rows[i]);
        }
    }
    return out;
}

}  // namespace epf::splits
