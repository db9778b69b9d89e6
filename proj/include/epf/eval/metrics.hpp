#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <span>

namespace epf::eval {

struct MetricOptions {
    bool mape = true;             // compute MAPE (undefined when some y_k == 0)
    bool tolerate_zeros = false;  // drop undefined rows from MAPE/SMAPE and count them instead of failing
};

struct MetricReport {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> mape;  // percent
    double smape = 0.0;          // percent, in [0, 200]
    std::size_t n = 0;
    std::size_t mape_excluded = 0;
    std::size_t smape_excluded = 0;

    bool operator==(const MetricReport&) const = default;
};

/// MAE = mean|y - f|, RMSE = sqrt(mean (y - f)^2), MAPE = 100 mean|y - f|/|y|,
/// SMAPE = 100 mean |y - f| / ((|y| + |f|) / 2).
/// Throws ShapeError on unequal or empty input. A zero actual with MAPE
/// requested, or y = f = 0 for SMAPE, throws DegenerateError unless
/// tolerate_zeros is set.
MetricReport metrics(std::span<const double> actual, std::span<const double> predicted,
                     const MetricOptions& options = {});

nlohmann::json to_json(const MetricReport& report);

}  // namespace epf::eval
