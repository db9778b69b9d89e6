#include "epf/dataio/synth.hpp"

#include "epf/dataio/catalog.hpp"
#include "epf/errors.hpp"

#include <cmath>
#include <numbers>

namespace epf::dataio {

namespace {

constexpr std::size_t kBurnIn = 50;

struct Scale {
    double center;
    double scale;
};

Scale feature_scale(std::size_t j) {
    const auto& info = feature_catalog()[j];
    switch (info.category) {
        case Category::kPrice: return j == 15 ? Scale{170.0, 35.0} : Scale{40.0, 8.0};
        case Category::kProduction:
        case Category::kProductionPrognosis:
        case Category::kConsumption:
        case Category::kConsumptionPrognosis: return {60000.0 + 5000.0 * static_cast<double>(j % 6), 6000.0};
        case Category::kFxRate: {
            static constexpr Scale kFx[] = {{9.6, 0.3}, {10.3, 0.3}, {7.46, 0.01}, {4.3, 0.08}};
            return kFx[j - 42];
        }
        case Category::kFlow: return {0.0, 9000.0};
        case Category::kFlowDeviation: return {900.0, 120.0};
    }
    return {0.0, 1.0};
}

bool is_shared_price(std::size_t j) { return j >= 1 && j <= 17; }

double seasonal(const SynthConfig& c, double t) {
    return c.level + c.annual_amplitude * std::sin(2.0 * std::numbers::pi * t / 365.25) +
           c.weekly_amplitude * std::sin(2.0 * std::numbers::pi * t / 7.0);
}

}  // namespace

double SyntheticDataset::deterministic_target(std::size_t row) const {
    if (row < config.target_lag) {
        throw ShapeError("deterministic_target: row precedes the target lag");
    }
    double value = seasonal(config, static_cast<double>(row));
    for (const auto& p : config.planted) {
        const double raw = table.columns[p.index][row - config.target_lag];
        value += p.coefficient * (raw - centers[p.index]) / scales[p.index];
    }
    return value;
}

SyntheticDataset synth_generate(numkernel::Rng& rng, std::size_t days, const SynthConfig& config) {
    if (days < 30) {
        throw ConfigError("synth_generate: need at least 30 days, got " + std::to_string(days));
    }
    for (const auto& p : config.planted) {
        if (p.index >= kFeatureCount) {
            throw ConfigError("planted feature index out of range");
        }
        if (p.index == 0 && config.lagged_price_feature) {
            throw ConfigError("F1 carries the lagged target and cannot be a planted feature");
        }
    }
    const double phi = config.feature_persistence;
    const double innov = std::sqrt(1.0 - phi * phi);
    const double w = config.price_factor_weight;

    SyntheticDataset out;
    out.config = config;
    out.seed = rng.state();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const auto s = feature_scale(j);
        out.centers.push_back(s.center);
        out.scales.push_back(s.scale);
    }

    const std::size_t total = days + kBurnIn;
    std::vector<std::vector<double>> x(kFeatureCount, std::vector<double>(total));
    std::vector<double> target(total);
    double factor = rng.normal();
    std::vector<double> own(kFeatureCount);
    for (auto& v : own) {
        v = rng.normal();
    }
    double u = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) {
            factor = phi * factor + innov * rng.normal();
            for (auto& v : own) {
                v = phi * v + innov * rng.normal();
            }
        }
        const double e = rng.normal();
        u = config.noise_ar * u + config.noise_sd * e;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            x[j][t] = is_shared_price(j) ? std::sqrt(w) * factor + std::sqrt(1.0 - w) * own[j] : own[j];
        }
        const double row = static_cast<double>(t) - static_cast<double>(kBurnIn);
        double value = seasonal(config, row) + u;
        if (t >= config.target_lag) {
            for (const auto& p : config.planted) {
                value += p.coefficient * x[p.index][t - config.target_lag];
            }
        }
        target[t] = value;
    }

    auto& table = out.table;
    table.granularity = Granularity::kDaily;
    using std::chrono::sys_days;
    for (std::size_t d = 0; d < days; ++d) {
        table.stamps.push_back(
            {std::chrono::year_month_day{sys_days{config.start} + std::chrono::days{static_cast<int>(d)}},
             -1});
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        std::vector<double> col(days);
        for (std::size_t d = 0; d < days; ++d) {
            const std::size_t t = d + kBurnIn;
            col[d] = (j == 0 && config.lagged_price_feature) ? target[t - 1]
                                                            : out.centers[j] + out.scales[j] * x[j][t];
        }
        table.add_column(feature_id(j), std::move(col));
    }
    table.add_column(std::string(kTargetColumn),
                     std::vector<double>(target.begin() + kBurnIn, target.end()));
    return out;
}

nlohmann::json metadata_json(const SyntheticDataset& data) {
    nlohmann::json planted = nlohmann::json::array();
    for (const auto& p : data.config.planted) {
        planted.push_back({{"feature", feature_id(p.index)}, {"coefficient", p.coefficient}});
    }
    return {{"seed_state", data.seed},
            {"days", data.table.rows()},
            {"planted", planted},
            {"level", data.config.level},
            {"annual_amplitude", data.config.annual_amplitude},
            {"weekly_amplitude", data.config.weekly_amplitude},
            {"noise_sd", data.config.noise_sd},
            {"noise_ar", data.config.noise_ar},
            {"feature_persistence", data.config.feature_persistence},
            {"price_factor_weight", data.config.price_factor_weight},
            {"target_lag", data.config.target_lag},
            {"lagged_price_feature", data.config.lagged_price_feature},
            {"centers", data.centers},
            {"scales", data.scales}};
}

}  // namespace epf::dataio
