#include "epf/featsel/pearson.hpp"

#include "epf/errors.hpp"

#include <cmath>

namespace epf::featsel {

namespace {

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - ma) * (b[i] - mb);
    }
    return s;
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ShapeError("pearson: length mismatch");
    }
    if (y.size() < 2) {
        throw DegenerateError("pearson: need at least 2 points");
    }
    const double mx = mean(x), my = mean(y);
    const double syy = centered_dot(y, my, y, my);
    if (syy == 0.0) {
        throw DegenerateError("pearson: target is constant");
    }
    const double sxx = centered_dot(x, mx, x, mx);
    if (sxx == 0.0) {
        return 0.0;
    }
    return centered_dot(x, mx, y, my) / std::sqrt(sxx * syy);
}

FeatureMask pearson_select(const SelectionData& data, std::size_t k) {
    const std::size_t d = data.features();
    std::vector<double> rho(d), strength(d);
    const std::span<const double> y(data.y.data(), data.rows());
    std::vector<double> col(data.rows());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < data.rows(); ++i) {
            col[i] = data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        rho[j] = pearson(col, y);
        strength[j] = std::abs(rho[j]);
    }
    auto mask = FeatureMask::from_bits(top_k(strength, k), "pc");
    mask.scores = rho;
    return mask;
}

}  // namespace epf::featsel
