#include "epf/explain/blackbox.hpp"

#include "epf/errors.hpp"

namespace epf::explain {

Matrix feature_rows(const dataio::TimeSeriesTable& table, const std::vector<std::string>& names,
                    dataio::RowRange rows) {
    if (rows.end > table.rows()) {
        throw ShapeError("feature_rows: range exceeds table");
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto& col = table.column(names[k]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = col[rows.begin + r];
        }
    }
    return out;
}

BundleView bundle_view(std::shared_ptr<models::ModelBundle> bundle, const dataio::TimeSeriesTable& recent) {
    if (recent.rows() < bundle->history()) {
        throw ShapeError("bundle_view: need " + std::to_string(bundle->history()) + " rows of history");
    }
    auto context = std::make_shared<dataio::TimeSeriesTable>(
        dataio::slice_rows(recent, {recent.rows() - bundle->history(), recent.rows()}));
    BundleView view;
    view.names = bundle->mask.selected();
    std::vector<std::size_t> cols;
    for (const auto& n : view.names) cols.push_back(context->index_of(n));
    const std::size_t last = context->rows() - 1;
    view.instance.resize(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        view.instance(static_cast<Eigen::Index>(k)) = context->columns[cols[k]][last];
    }
    view.predictor = [bundle, context, cols, last](const Matrix& x) {
        Vector out(x.rows());
        dataio::TimeSeriesTable work = *context;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (std::size_t k = 0; k < cols.size(); ++k) {
                work.columns[cols[k]][last] = x(r, static_cast<Eigen::Index>(k));
            }
            out(r) = bundle->predict(work);
        }
        return out;
    };
    return view;
}

}  // namespace epf::explain
