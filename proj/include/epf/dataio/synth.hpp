#pragma once

#include "epf/dataio/table.hpp"
#include "epf/numkernel/rng.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstddef>
#include <vector>

namespace epf::dataio {

struct PlantedFeature {
    std::size_t index;   // 0-based catalog index
    double coefficient;  // weight on the standardized feature
};

/// Generator settings for the synthetic daily fixture.
///
/// Each feature j follows a unit-variance AR(1) process x_j. The price
/// features F2..F18 share a common AR(1) factor with weight
/// `price_factor_weight` (so they are mutually correlated, as zonal prices
/// are). The published column is F_j = center_j + scale_j * x_j. The target is
///
///   target(t) = level + annual_amplitude * sin(2 pi t / 365.25)
///                     + weekly_amplitude * sin(2 pi t / 7)
///                     + sum_{j in planted} coefficient_j * x_j(t - target_lag)
///                     + u(t),   u(t) = noise_ar * u(t-1) + noise_sd * e(t)
///
/// with t the row index. When `lagged_price_feature` is set, F1 carries
/// target(t-1) instead of an independent process.
struct SynthConfig {
    std::chrono::year_month_day start{std::chrono::year{2016}, std::chrono::January,
                                      std::chrono::day{1}};
    double level = 40.0;
    double annual_amplitude = 8.0;
    double weekly_amplitude = 3.0;
    double noise_sd = 1.0;
    double noise_ar = 0.5;
    double feature_persistence = 0.9;
    double price_factor_weight = 0.5;
    std::size_t target_lag = 1;
    bool lagged_price_feature = true;
    std::vector<PlantedFeature> planted{{1, 3.0}, {16, 2.0}, {34, 5.0}};  // F2, F17, F35
};

struct SyntheticDataset {
    TimeSeriesTable table;
    SynthConfig config;
    std::uint64_t seed = 0;
    std::vector<double> centers;  // per catalog feature
    std::vector<double> scales;

    // Noise-free part of the target at `row` (requires row >= target_lag),
    // recomputed from the published feature columns.
    double deterministic_target(std::size_t row) const;
};

// `days` >= 30.
SyntheticDataset synth_generate(numkernel::Rng& rng, std::size_t days, const SynthConfig& config = {});

nlohmann::json metadata_json(const SyntheticDataset& data);

}  // namespace epf::dataio
