#include "epf/eval/stats.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace epf::eval {

double percentile(std::span<const double> values, double q) {
    if (values.empty()) {
        throw ShapeError("percentile of an empty sample");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ExperimentStats describe(std::span<const double> values) {
    if (values.empty()) {
        throw ShapeError("describe of an empty sample");
    }
    ExperimentStats s;
    s.count = values.size();
    const auto n = static_cast<double>(s.count);
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.p25 = percentile(values, 0.25);
    s.p50 = percentile(values, 0.50);
    s.p75 = percentile(values, 0.75);
    return s;
}

nlohmann::json to_json(const ExperimentStats& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"25%", s.p25},
            {"50%", s.p50},     {"75%", s.p75},   {"max", s.max}};
}

}  // namespace epf::eval
