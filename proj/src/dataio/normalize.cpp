#include "epf/dataio/normalize.hpp"

#include "epf/errors.hpp"

#include <algorithm>

namespace epf::dataio {

std::size_t NormalizationParams::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return i;
        }
    }
    throw SchemaError("column '" + std::string(name) + "' has no normalization parameters");
}

double NormalizationParams::apply(std::size_t col, double x) const {
    if (constant[col]) {
        return 0.0;
    }
    const double z = (x - min[col]) / (max[col] - min[col]);
    return std::clamp(z, 0.0, 1.0);
}

double NormalizationParams::invert(std::size_t col, double z) const {
    if (constant[col]) {
        return min[col];
    }
    return min[col] + z * (max[col] - min[col]);
}

NormalizationParams fit_normalizer(const TimeSeriesTable& table, RowRange fit_rows) {
    if (fit_rows.empty() || fit_rows.end > table.rows()) {
        throw ShapeError("fit_normalizer: fit rows [" + std::to_string(fit_rows.begin) + ", " +
                         std::to_string(fit_rows.end) + ") invalid for " +
                         std::to_string(table.rows()) + " rows");
    }
    NormalizationParams params;
    params.names = table.names;
    for (const auto& col : table.columns) {
        const auto first = col.begin() + static_cast<std::ptrdiff_t>(fit_rows.begin);
        const auto last = col.begin() + static_cast<std::ptrdiff_t>(fit_rows.end);
        const auto [lo, hi] = std::minmax_element(first, last);
        params.min.push_back(*lo);
        params.max.push_back(*hi);
        params.constant.push_back(*hi == *lo);
    }
    return params;
}

namespace {

template <typename Fn>
TimeSeriesTable transform(const TimeSeriesTable& table, const NormalizationParams& params, Fn fn) {
    TimeSeriesTable out = table;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        const auto p = params.index_of(out.names[c]);
        for (auto& v : out.columns[c]) {
            v = fn(p, v);
        }
    }
    return out;
}

}  // namespace

TimeSeriesTable apply_normalizer(const TimeSeriesTable& table, const NormalizationParams& params) {
    return transform(table, params, [&](std::size_t p, double v) { return params.apply(p, v); });
}

TimeSeriesTable invert_normalizer(const TimeSeriesTable& table, const NormalizationParams& params) {
    return transform(table, params, [&](std::size_t p, double v) { return params.invert(p, v); });
}

nlohmann::json to_json(const NormalizationParams& params) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < params.names.size(); ++i) {
        j.push_back({{"column", params.names[i]},
                     {"min", params.min[i]},
                     {"max", params.max[i]},
                     {"constant", static_cast<bool>(params.constant[i])}});
    }
    return j;
}

NormalizationParams normalization_from_json(const nlohmann::json& j) {
    NormalizationParams params;
    for (const auto& entry : j) {
        params.names.push_back(entry.at("column").get<std::string>());
        params.min.push_back(entry.at("min").get<double>());
        params.max.push_back(entry.at("max").get<double>());
        params.constant.push_back(entry.at("constant").get<bool>());
    }
    return params;
}

}  // namespace epf::dataio
