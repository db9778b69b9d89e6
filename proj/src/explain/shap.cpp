#include "epf/explain/shap.hpp"

#include "epf/errors.hpp"
#include "epf/featsel/pearson.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace epf::explain {

namespace {

void check_inputs(const Vector& instance, const Background& background) {
    if (background.rows.rows() == 0) {
        throw ShapeError("shap: empty background set");
    }
    if (background.rows.cols() != instance.size() || instance.size() == 0) {
        throw ShapeError("shap: instance and background differ in width");
    }
}

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

// Shapley kernel weight of one coalition of size s out of d.
double kernel_weight(std::size_t d, std::size_t s) {
    return static_cast<double>(d - 1) /
           (std::exp(log_choose(d, s)) * static_cast<double>(s) * static_cast<double>(d - s));
}

std::vector<std::uint8_t> bits_of(std::uint64_t code, std::size_t d) {
    std::vector<std::uint8_t> b(d);
    for (std::size_t j = 0; j < d; ++j) b[j] = (code >> j) & 1U;
    return b;
}

struct Sample {
    std::vector<std::uint8_t> present;
    double weight;
};

std::vector<Sample> enumerate_all(std::size_t d) {
    std::vector<Sample> out;
    const std::uint64_t full = (std::uint64_t{1} << d) - 1;
    for (std::uint64_t code = 1; code < full; ++code) {
        auto b = bits_of(code, d);
        const auto s = static_cast<std::size_t>(std::count(b.begin(), b.end(), 1));
        out.push_back({std::move(b), kernel_weight(d, s)});
    }
    return out;
}

// Coalition sizes drawn from the kernel's size distribution, each paired with its complement.
std::vector<Sample> sample_pairs(std::size_t d, std::size_t n, numkernel::Rng& rng) {
    std::vector<double> size_prob(d, 0.0);
    double total = 0.0;
    for (std::size_t s = 1; s < d; ++s) {
        size_prob[s] = static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
        total += size_prob[s];
    }
    std::vector<Sample> out;
    std::vector<std::size_t> idx(d);
    while (out.size() + 2 <= n) {
        double u = rng.uniform() * total;
        std::size_t s = 1;
        while (s + 1 < d && u > size_prob[s]) {
            u -= size_prob[s];
            ++s;
        }
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        rng.shuffle(idx);
        std::vector<std::uint8_t> b(d, 0);
        for (std::size_t k = 0; k < s; ++k) b[idx[k]] = 1;
        std::vector<std::uint8_t> c(d);
        for (std::size_t j = 0; j < d; ++j) c[j] = 1 - b[j];
        out.push_back({std::move(b), 1.0});
        out.push_back({std::move(c), 1.0});
    }
    return out;
}

std::optional<Vector> constrained_solve(const std::vector<Sample>& samples, const std::vector<double>& values,
                                        double base, double delta, std::size_t d) {
    // phi_last = delta - sum(others); regress on (z_j - z_last).
    const auto rows = static_cast<Eigen::Index>(samples.size());
    const auto p = static_cast<Eigen::Index>(d - 1);
    Matrix a(rows, p);
    Vector y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& z = samples[static_cast<std::size_t>(r)].present;
        const double w = std::sqrt(samples[static_cast<std::size_t>(r)].weight);
        const double last = z[d - 1];
        for (Eigen::Index j = 0; j < p; ++j) a(r, j) = w * (z[static_cast<std::size_t>(j)] - last);
        y(r) = w * (values[static_cast<std::size_t>(r)] - base - last * delta);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    if (qr.rank() < p) {
        return std::nullopt;
    }
    const Vector head = qr.solve(y);
    Vector phi(static_cast<Eigen::Index>(d));
    phi.head(p) = head;
    phi(p) = delta - head.sum();
    return phi;
}

}  // namespace

Background sample_background(const Matrix& train, std::size_t n, numkernel::Rng& rng) {
    if (train.rows() == 0 || n == 0) {
        throw ShapeError("background: need a non-empty training matrix and n > 0");
    }
    const auto total = static_cast<std::size_t>(train.rows());
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n < total) {
        rng.shuffle(idx);
        idx.resize(n);
        std::sort(idx.begin(), idx.end());
    }
    Background b{Matrix(static_cast<Eigen::Index>(idx.size()), train.cols())};
    for (std::size_t r = 0; r < idx.size(); ++r) {
        b.rows.row(static_cast<Eigen::Index>(r)) = train.row(static_cast<Eigen::Index>(idx[r]));
    }
    return b;
}

double coalition_value(const Predictor& f, const Vector& instance, const Background& background,
                       const std::vector<std::uint8_t>& present) {
    Matrix z = background.rows;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        if (present[static_cast<std::size_t>(j)]) z.col(j).setConstant(instance(j));
    }
    return f(z).mean();
}

ShapExplanation exact_shapley(const Predictor& f, const Vector& instance, const Background& background) {
    check_inputs(instance, background);
    const auto d = static_cast<std::size_t>(instance.size());
    if (d > 15) {
        throw FeasibilityError("exact_shapley: " + std::to_string(d) + " features exceed the 15-feature limit");
    }
    const std::uint64_t count = std::uint64_t{1} << d;
    std::vector<double> v(count);
    for (std::uint64_t code = 0; code < count; ++code) v[code] = coalition_value(f, instance, background, bits_of(code, d));
    ShapExplanation e;
    e.instance = instance;
    e.base = v[0];
    e.prediction = f(instance.transpose())(0);
    e.coalitions = count;
    e.phi.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << j;
        for (std::uint64_t code = 0; code < count; ++code) {
            if (code & bit) continue;
            const auto s = static_cast<std::size_t>(std::popcount(code));
            // |S|! (d - |S| - 1)! / d!
            const double w = std::exp(std::lgamma(s + 1.0) + std::lgamma(static_cast<double>(d - s)) -
                                      std::lgamma(static_cast<double>(d) + 1.0));
            e.phi[j] += w * (v[code | bit] - v[code]);
        }
    }
    return e;
}

ShapExplanation kernel_shap(const Predictor& f, const Vector& instance, const Background& background,
                            const KernelShapConfig& config) {
    check_inputs(instance, background);
    const auto d = static_cast<std::size_t>(instance.size());
    if (config.n_coalitions < d + 2) {
        throw ConfigError("kernel_shap: need at least d + 2 = " + std::to_string(d + 2) + " coalitions");
    }
    ShapExplanation e;
    e.instance = instance;
    e.base = coalition_value(f, instance, background, std::vector<std::uint8_t>(d, 0));
    e.prediction = coalition_value(f, instance, background, std::vector<std::uint8_t>(d, 1));
    const double delta = e.prediction - e.base;
    if (d == 1) {
        e.phi = {delta};
        return e;
    }
    numkernel::Rng rng(config.seed);
    std::size_t budget = config.n_coalitions;
    for (int attempt = 0; attempt < 2; ++attempt, budget *= 2) {
        const bool full = d < 63 && budget >= (std::uint64_t{1} << d) - 2;
        const auto samples = full ? enumerate_all(d) : sample_pairs(d, budget, rng);
        std::vector<double> values;
        values.reserve(samples.size());
        for (const auto& s : samples) values.push_back(coalition_value(f, instance, background, s.present));
        if (auto phi = constrained_solve(samples, values, e.base, delta, d)) {
            e.phi.assign(phi->begin(), phi->end());
            e.coalitions = samples.size();
            return e;
        }
    }
    throw DegenerateError("kernel_shap: coalition regression is rank deficient");
}

std::vector<RankedFeature> importance_ranking(const std::vector<ShapExplanation>& explanations,
                                              const std::vector<std::string>& names) {
    if (explanations.empty()) {
        throw ShapeError("importance_ranking: no explanations");
    }
    const auto d = explanations.front().phi.size();
    if (names.size() != d) {
        throw ShapeError("importance_ranking: one name per feature");
    }
    std::vector<RankedFeature> out(d);
    for (std::size_t j = 0; j < d; ++j) {
        out[j].index = j;
        out[j].name = names[j];
        for (const auto& e : explanations) out[j].mean_abs_phi += std::abs(e.phi.at(j));
        out[j].mean_abs_phi /= static_cast<double>(explanations.size());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedFeature& a, const RankedFeature& b) { return a.mean_abs_phi > b.mean_abs_phi; });
    return out;
}

nlohmann::json to_json(const std::vector<RankedFeature>& ranking) {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        j.push_back({{"rank", r + 1}, {"feature", ranking[r].name}, {"mean_abs_shap", ranking[r].mean_abs_phi}});
    }
    return j;
}

DependenceExport dependence_export(const std::vector<ShapExplanation>& explanations,
                                   const std::vector<std::string>& names, std::string_view feature,
                                   std::optional<std::string_view> interaction) {
    auto index_of = [&](std::string_view name) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw SchemaError("dependence_export: unknown feature '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - names.begin());
    };
    const auto j = index_of(feature);
    std::vector<double> phi;
    for (const auto& e : explanations) phi.push_back(e.phi.at(j));
    std::size_t partner = j;
    if (interaction) {
        partner = index_of(*interaction);
    } else if (names.size() > 1) {
        double best = -1.0;
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (k == j) continue;
            double strength = 0.0;
            if (phi.size() >= 2) {
                std::vector<double> xk;
                for (const auto& e : explanations) xk.push_back(e.instance(static_cast<Eigen::Index>(k)));
                try {
                    strength = std::abs(featsel::pearson(xk, phi));
                } catch (const DegenerateError&) {
                    strength = 0.0;  // constant attributions carry no interaction signal
                }
            }
            if (strength > best) {
                best = strength;
                partner = k;
            }
        }
    }
    DependenceExport out{names[j], names[partner], {}};
    for (const auto& e : explanations) {
        out.rows.push_back({e.instance(static_cast<Eigen::Index>(j)), e.phi[j],
                            e.instance(static_cast<Eigen::Index>(partner))});
    }
    return out;
}

std::string DependenceExport::to_csv() const {
    std::ostringstream csv;
    csv << "feature,value,phi,interaction_value\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g", r.value, r.phi, r.interaction_value);
        csv << feature << ',' << buf << '\n';
    }
    return csv.str();
}

}  // namespace epf::explain
