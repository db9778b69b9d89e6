#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/mask.hpp"
#include "epf/featsel/svr.hpp"
#include "epf/explain/shap.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace epf::explain {

struct SurrogateGrid {
    std::vector<double> c{0.1, 1.0, 10.0, 100.0};
    std::vector<double> epsilon{0.01, 0.1, 0.5};
    double train_fraction = 0.8;  // chronological split for selection
    featsel::SvrConfig solver = featsel::kRfeSvrConfig;
};

struct SurrogateModel {
    std::vector<std::size_t> columns;  // selected feature indices into the full table
    std::vector<std::string> names;
    featsel::SvrModel svr;             // refit on all rows at the chosen point
    double c = 0.0;
    double epsilon = 0.0;
    double validation_mse = 0.0;

    // Inputs restricted to `columns`.
    Vector predict(const Matrix& x) const { return svr.predict(x); }
    Predictor predictor() const;
    // Copies the selected columns out of a full-width matrix.
    Matrix project(const Matrix& full) const;
};

/// Grid search over (C, epsilon) in row-major order; the first point with
/// the lowest validation MSE wins. Throws ConfigError for an empty grid or
/// mask and ShapeError when the split leaves no validation rows.
SurrogateModel fit_surrogate_svr(const featsel::SelectionData& data, const featsel::FeatureMask& mask,
                                 const SurrogateGrid& grid = {});

nlohmann::json to_json(const SurrogateModel& model);

}  // namespace epf::explain
