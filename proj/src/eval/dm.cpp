#include "epf/eval/dm.hpp"

#include "epf/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace epf::eval {

DmResult dm_test(std::span<const double> e1, std::span<const double> e2, DmSide side) {
    if (e1.size() != e2.size()) {
        throw ShapeError("dm_test: error series differ in length");
    }
    const std::size_t t_len = e1.size();
    if (t_len < 10) {
        throw ShapeError("dm_test: need at least 10 paired errors, got " + std::to_string(t_len));
    }
    const auto t = static_cast<double>(t_len);
    std::vector<double> d(t_len);
    double mean = 0.0;
    for (std::size_t k = 0; k < t_len; ++k) {
        d[k] = std::abs(e1[k]) - std::abs(e2[k]);
        mean += d[k];
    }
    mean /= t;
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= t;
    if (!(var > 0.0)) {
        throw DegenerateError("dm_test: loss differential has zero variance");
    }
    DmResult r;
    r.n = t_len;
    r.side = side;
    r.raw_statistic = mean / std::sqrt(var / t);
    r.statistic = r.raw_statistic * std::sqrt((t - 1.0) / t);
    const boost::math::students_t dist(t - 1.0);
    r.p_value = side == DmSide::kF2Better ? boost::math::cdf(boost::math::complement(dist, r.statistic))
                                          : boost::math::cdf(dist, r.statistic);
    return r;
}

double DmResult::directional_p() const {
    const bool requested = (statistic > 0) == (side == DmSide::kF2Better);
    return requested ? p_value : 1.0 - p_value;
}

std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    if (p < 0.15) return "#";
    return "";
}

std::string dm_cell(const DmResult& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r.statistic);
    return buf + significance_stars(r.directional_p());
}

DmMatrix dm_matrix(const std::vector<std::string>& models, const std::vector<std::vector<double>>& errors) {
    if (models.size() != errors.size()) {
        throw ShapeError("dm_matrix: one error series per model");
    }
    const auto m = models.size();
    DmMatrix out;
    out.models = models;
    out.statistic.assign(m, std::vector<double>(m, 0.0));
    out.p_values.assign(m, std::vector<double>(m, 1.0));
    out.errors.assign(m, std::vector<std::string>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            try {
                const auto r = dm_test(errors[i], errors[j], DmSide::kF2Better);
                out.statistic[i][j] = r.statistic;
                out.p_values[i][j] = r.directional_p();
            } catch (const DegenerateError& e) {
                out.errors[i][j] = e.what();
            }
        }
    }
    return out;
}

std::string DmMatrix::to_csv() const {
    std::ostringstream csv;
    csv << "F1\\F2";
    for (const auto& m : models) csv << ',' << m;
    csv << '\n';
    char buf[32];
    for (std::size_t i = 0; i < models.size(); ++i) {
        csv << models[i];
        for (std::size_t j = 0; j < models.size(); ++j) {
            csv << ',';
            if (i == j) continue;
            if (!errors[i][j].empty()) {
                csv << "n/a";
                continue;
            }
            std::snprintf(buf, sizeof buf, "%.2f", statistic[i][j]);
            csv << buf << significance_stars(p_values[i][j]);
        }
        csv << '\n';
    }
    return csv.str();
}

nlohmann::json DmMatrix::to_json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = 0; j < models.size(); ++j) {
            if (i == j) continue;
            nlohmann::json c{{"f1", models[i]}, {"f2", models[j]}};
            if (errors[i][j].empty()) {
                c["statistic"] = statistic[i][j];
                c["p_value"] = p_values[i][j];
                c["stars"] = significance_stars(p_values[i][j]);
            } else {
                c["error"] = errors[i][j];
            }
            cells.push_back(c);
        }
    }
    return {{"models", models}, {"cells", cells}};
}

}  // namespace epf::eval
