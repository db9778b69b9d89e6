#include "epf/eval/metrics.hpp"

#include "epf/errors.hpp"

#include <cmath>
#include <string>

namespace epf::eval {

MetricReport metrics(std::span<const double> actual, std::span<const double> predicted,
                     const MetricOptions& options) {
    if (actual.size() != predicted.size() || actual.empty()) {
        throw ShapeError("metrics: need equal, non-empty actual and predicted series (got " +
                         std::to_string(actual.size()) + " and " + std::to_string(predicted.size()) + ")");
    }
    MetricReport r;
    r.n = actual.size();
    double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0, sape_sum = 0.0;
    for (std::size_t k = 0; k < r.n; ++k) {
        const double y = actual[k], f = predicted[k];
        const double e = std::abs(y - f);
        abs_sum += e;
        sq_sum += e * e;
        if (options.mape) {
            if (y == 0.0) {
                if (!options.tolerate_zeros) {
                    throw DegenerateError("MAPE undefined: actual value is zero at index " + std::to_string(k));
                }
                ++r.mape_excluded;
            } else {
                ape_sum += e / std::abs(y);
            }
        }
        const double denom = (std::abs(y) + std::abs(f)) / 2.0;
        if (denom == 0.0) {
            if (!options.tolerate_zeros) {
                throw DegenerateError("SMAPE undefined: actual and forecast both zero at index " + std::to_string(k));
            }
            ++r.smape_excluded;
        } else {
            sape_sum += e / denom;
        }
    }
    const auto n = static_cast<double>(r.n);
    r.mae = abs_sum / n;
    r.rmse = std::sqrt(sq_sum / n);
    if (options.mape) {
        const auto used = r.n - r.mape_excluded;
        if (used == 0) {
            throw DegenerateError("MAPE undefined: every actual value is zero");
        }
        r.mape = 100.0 * ape_sum / static_cast<double>(used);
    }
    const auto used = r.n - r.smape_excluded;
    if (used == 0) {
        throw DegenerateError("SMAPE undefined: every pair is zero");
    }
    r.smape = 100.0 * sape_sum / static_cast<double>(used);
    return r;
}

nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json j{{"mae", r.mae}, {"rmse", r.rmse}, {"smape", r.smape}, {"n", r.n}};
    j["mape"] = r.mape ? nlohmann::json(*r.mape) : nlohmann::json(nullptr);
    if (r.mape_excluded > 0) j["mape_excluded"] = r.mape_excluded;
    if (r.smape_excluded > 0) j["smape_excluded"] = r.smape_excluded;
    return j;
}

}  // namespace epf::eval
