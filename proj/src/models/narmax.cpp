#include "epf/models/narmax.hpp"

#include "epf/errors.hpp"
#include "epf/numkernel/linalg.hpp"

#include <algorithm>

namespace epf::models {

std::size_t NarmaxOrder::max_lag() const { return std::max({ny, nx > 0 ? nx - 1 : 0, ne}); }

namespace {

void check(const NarmaxOrder& order) {
    if (order.degree < 1 || order.degree > 2) {
        throw ConfigError("narmax: degree must be 1 or 2");
    }
}

}  // namespace

std::vector<double> narmax_regressors(const NarmaxOrder& order, std::span<const double> y, const Matrix& x,
                                      std::span<const double> e, std::size_t t) {
    std::vector<double> r{1.0};
    for (std::size_t k = 1; k <= order.ny; ++k) r.push_back(y[t - k]);
    for (std::size_t k = 1; k <= order.ne; ++k) r.push_back(e.empty() ? 0.0 : e[t - k]);
    const std::size_t ar_end = r.size();
    for (std::size_t k = 0; k < order.nx; ++k) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) r.push_back(x(static_cast<Eigen::Index>(t - k), j));
    }
    if (order.degree == 2) {
        const std::size_t linear_end = r.size();
        for (std::size_t a = 1; a < ar_end; ++a) {
            for (std::size_t b = a; b < ar_end; ++b) r.push_back(r[a] * r[b]);
        }
        for (std::size_t a = ar_end; a < linear_end; ++a) r.push_back(r[a] * r[a]);
    }
    return r;
}

std::vector<std::string> narmax_term_names(const NarmaxOrder& order, std::size_t exogenous) {
    check(order);
    std::vector<std::string> names{"1"};
    for (std::size_t k = 1; k <= order.ny; ++k) names.push_back("y(t-" + std::to_string(k) + ")");
    for (std::size_t k = 1; k <= order.ne; ++k) names.push_back("e(t-" + std::to_string(k) + ")");
    const std::size_t ar_end = names.size();
    for (std::size_t k = 0; k < order.nx; ++k) {
        for (std::size_t j = 0; j < exogenous; ++j) {
            names.push_back("x" + std::to_string(j + 1) + (k == 0 ? "(t)" : "(t-" + std::to_string(k) + ")"));
        }
    }
    if (order.degree == 2) {
        const std::size_t linear_end = names.size();
        for (std::size_t a = 1; a < ar_end; ++a) {
            for (std::size_t b = a; b < ar_end; ++b) names.push_back(names[a] + "*" + names[b]);
        }
        for (std::size_t a = ar_end; a < linear_end; ++a) names.push_back(names[a] + "^2");
    }
    return names;
}

double NarmaxModel::predict(std::span<const double> y, const Matrix& x, std::size_t t) const {
    if (t < order.max_lag() || t >= static_cast<std::size_t>(x.rows()) || t > y.size()) {
        throw ShapeError("narmax: target index lacks the required history");
    }
    if (static_cast<std::size_t>(x.cols()) != exogenous) {
        throw SchemaError("narmax: expected " + std::to_string(exogenous) + " exogenous inputs");
    }
    const auto r = narmax_regressors(order, y, x, {}, t);
    double out = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) out += coefficients(static_cast<Eigen::Index>(i)) * r[i];
    return out;
}

std::vector<double> NarmaxModel::predict(std::span<const double> y, const Matrix& x,
                                         dataio::RowRange targets) const {
    std::vector<double> out;
    out.reserve(targets.size());
    for (std::size_t t = targets.begin; t < targets.end; ++t) out.push_back(predict(y, x, t));
    return out;
}

NarmaxModel narmax_fit(std::span<const double> y, const Matrix& x, dataio::RowRange rows, const NarmaxOrder& order,
                       const NarmaxFitConfig& config) {
    check(order);
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw ShapeError("narmax: inputs and target differ in length");
    }
    const std::size_t first = std::max(rows.begin, order.max_lag());
    const std::size_t last = std::min(rows.end, y.size());
    NarmaxModel model;
    model.order = order;
    model.exogenous = static_cast<std::size_t>(x.cols());
    model.terms = narmax_term_names(order, model.exogenous);
    const auto p = static_cast<Eigen::Index>(model.terms.size());
    if (last <= first || static_cast<Eigen::Index>(last - first) < 2) {
        throw DataError("narmax: not enough rows after the lag burn-in");
    }
    const auto n = static_cast<Eigen::Index>(last - first);

    std::vector<double> e(y.size(), 0.0);
    Matrix design(n, p);
    Vector target(n);
    auto build = [&] {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto t = first + static_cast<std::size_t>(i);
            const auto r = narmax_regressors(order, y, x, e, t);
            for (Eigen::Index c = 0; c < p; ++c) design(i, c) = r[static_cast<std::size_t>(c)];
            target(i) = y[t];
        }
    };
    build();
    model.coefficients = numkernel::least_squares(design, target);
    model.iterations = 1;
    if (order.ne == 0) {
        model.converged = true;
        return model;
    }
    while (model.iterations < config.max_iterations) {
        const Vector fitted = design * model.coefficients;
        for (Eigen::Index i = 0; i < n; ++i) e[first + static_cast<std::size_t>(i)] = target(i) - fitted(i);
        build();
        const Vector next = numkernel::least_squares(design, target);
        const double change = (next - model.coefficients).cwiseAbs().maxCoeff();
        model.coefficients = next;
        ++model.iterations;
        if (change < config.tolerance) {
            model.converged = true;
            break;
        }
    }
    return model;
}

nlohmann::json to_json(const NarmaxModel& m) {
    return {{"order", {{"ny", m.order.ny}, {"nx", m.order.nx}, {"ne", m.order.ne}, {"degree", m.order.degree}}},
            {"exogenous", m.exogenous},
            {"coefficients", std::vector<double>(m.coefficients.begin(), m.coefficients.end())},
            {"iterations", m.iterations},
            {"converged", m.converged}};
}

NarmaxModel narmax_from_json(const nlohmann::json& j) {
    NarmaxModel m;
    try {
        const auto& o = j.at("order");
        m.order = {o.at("ny").get<std::size_t>(), o.at("nx").get<std::size_t>(), o.at("ne").get<std::size_t>(),
                   o.at("degree").get<int>()};
        m.exogenous = j.at("exogenous").get<std::size_t>();
        const auto c = j.at("coefficients").get<std::vector<double>>();
        m.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
        m.iterations = j.value("iterations", std::size_t{0});
        m.converged = j.value("converged", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed narmax document: ") + e.what());
    }
    m.terms = narmax_term_names(m.order, m.exogenous);
    if (m.terms.size() != static_cast<std::size_t>(m.coefficients.size())) {
        throw SchemaError("narmax: coefficient count does not match the order");
    }
    return m;
}

}  // namespace epf::models
