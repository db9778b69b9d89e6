#pragma once

#include "epf/dataio/table.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace epf::dataio {

// Per-column [0,1] scaling fitted on a training window.
struct NormalizationParams {
    std::vector<std::string> names;
    std::vector<double> min;
    std::vector<double> max;
    std::vector<bool> constant;  // max == min on the fitting window

    std::size_t index_of(std::string_view name) const;

    // (x - min) / (max - min) clipped to [0, 1]; constant columns map to 0.
    double apply(std::size_t col, double x) const;
    // Exact inverse on [0, 1]; constant columns map back to min.
    double invert(std::size_t col, double z) const;

    bool operator==(const NormalizationParams&) const = default;
};

// Min/max from `fit_rows` only.
NormalizationParams fit_normalizer(const TimeSeriesTable& table, RowRange fit_rows);

TimeSeriesTable apply_normalizer(const TimeSeriesTable& table, const NormalizationParams& params);
TimeSeriesTable invert_normalizer(const TimeSeriesTable& table, const NormalizationParams& params);

nlohmann::json to_json(const NormalizationParams& params);
NormalizationParams normalization_from_json(const nlohmann::json& j);

}  // namespace epf::dataio
