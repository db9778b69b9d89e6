#pragma once

#include <nlohmann/json.hpp>

#include <span>

namespace epf::eval {

// Summary in the describe() layout: sample std (n - 1; zero for one value)
// and linearly interpolated percentiles.
struct ExperimentStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double max = 0.0;

    bool operator==(const ExperimentStats&) const = default;
};

// q in [0, 1]; position q * (n - 1) between closest ranks. Throws ShapeError when empty.
double percentile(std::span<const double> values, double q);

ExperimentStats describe(std::span<const double> values);

nlohmann::json to_json(const ExperimentStats& stats);

}  // namespace epf::eval
