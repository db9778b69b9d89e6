#include "epf/explain/surrogate.hpp"

#include "epf/dataio/catalog.hpp"
#include "epf/errors.hpp"

#include <limits>

namespace epf::explain {

Matrix SurrogateModel::project(const Matrix& full) const {
    Matrix out(full.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = full.col(static_cast<Eigen::Index>(columns[k]));
    }
    return out;
}

Predictor SurrogateModel::predictor() const {
    return [svr = svr](const Matrix& x) { return svr.predict(x); };
}

SurrogateModel fit_surrogate_svr(const featsel::SelectionData& data, const featsel::FeatureMask& mask,
                                 const SurrogateGrid& grid) {
    if (grid.c.empty() || grid.epsilon.empty()) {
        throw ConfigError("surrogate: empty hyper-parameter grid");
    }
    SurrogateModel model;
    for (std::size_t j = 0; j < mask.bits.size(); ++j) {
        if (mask.bits[j]) {
            model.columns.push_back(j);
            model.names.push_back(dataio::feature_id(j));
        }
    }
    if (model.columns.empty()) {
        throw ConfigError("surrogate: mask selects no features");
    }
    const auto [train, validation] = featsel::chronological_split(data, grid.train_fraction);
    if (train.rows() == 0 || validation.rows() == 0) {
        throw ShapeError("surrogate: split leaves an empty side");
    }
    const Matrix xt = model.project(train.x);
    const Matrix xv = model.project(validation.x);
    double best = std::numeric_limits<double>::infinity();
    for (const double c : grid.c) {
        for (const double eps : grid.epsilon) {
            featsel::SvrConfig cfg = grid.solver;
            cfg.c = c;
            cfg.epsilon = eps;
            const auto fit = featsel::svr_fit(xt, train.y, cfg);
            const double mse = (fit.predict(xv) - validation.y).squaredNorm() / static_cast<double>(validation.rows());
            if (mse < best) {
                best = mse;
                model.c = c;
                model.epsilon = eps;
            }
        }
    }
    model.validation_mse = best;
    featsel::SvrConfig cfg = grid.solver;
    cfg.c = model.c;
    cfg.epsilon = model.epsilon;
    model.svr = featsel::svr_fit(model.project(data.x), data.y, cfg);
    return model;
}

nlohmann::json to_json(const SurrogateModel& model) {
    return {{"features", model.names},
            {"c", model.c},
            {"epsilon", model.epsilon},
            {"validation_mse", model.validation_mse},
            {"weights", std::vector<double>(model.svr.w.begin(), model.svr.w.end())},
            {"bias", model.svr.b}};
}

}  // namespace epf::explain
