#pragma once

#include "epf/explain/shap.hpp"
#include "epf/models/pipeline.hpp"

#include <memory>

namespace epf::explain {

/// Explains a trained bundle's next-day forecast through the black-box
/// interface. The explained inputs are the mask's features on the last row
/// of `recent` in raw units; earlier rows stay fixed as context.
struct BundleView {
    std::vector<std::string> names;
    Vector instance;  // last-row values of `names`
    Predictor predictor;
};

BundleView bundle_view(std::shared_ptr<models::ModelBundle> bundle, const dataio::TimeSeriesTable& recent);

// Values of `names` on each row of `rows`, one matrix row per table row.
Matrix feature_rows(const dataio::TimeSeriesTable& table, const std::vector<std::string>& names,
                    dataio::RowRange rows);

}  // namespace epf::explain
