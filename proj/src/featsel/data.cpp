#include "epf/featsel/data.hpp"

#include "epf/dataio/catalog.hpp"
#include "epf/errors.hpp"

namespace epf::featsel {

SelectionData SelectionData::from_table(const dataio::TimeSeriesTable& table, dataio::RowRange rows,
                                        std::string_view target_column, std::size_t lag) {
    if (rows.end > table.rows() || rows.size() <= lag + 1) {
        throw ShapeError("selection rows [" + std::to_string(rows.begin) + ", " + std::to_string(rows.end) +
                         ") leave too few samples at lag " + std::to_string(lag));
    }
    const std::size_t n = rows.size() - lag;
    SelectionData d;
    d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dataio::kFeatureCount));
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < dataio::kFeatureCount; ++j) {
        const auto& col = table.column(dataio::feature_id(j));
        for (std::size_t i = 0; i < n; ++i) {
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[rows.begin + i];
        }
    }
    const auto& target = table.column(target_column);
    for (std::size_t i = 0; i < n; ++i) {
        d.y(static_cast<Eigen::Index>(i)) = target[rows.begin + lag + i];
    }
    return d;
}

SelectionData SelectionData::head(std::size_t n) const {
    return {x.topRows(static_cast<Eigen::Index>(n)), y.head(static_cast<Eigen::Index>(n))};
}

SelectionData SelectionData::tail_from(std::size_t start) const {
    const auto m = static_cast<Eigen::Index>(rows() - start);
    return {x.bottomRows(m), y.tail(m)};
}

std::pair<SelectionData, SelectionData> chronological_split(const SelectionData& data, double train_fraction) {
    const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(data.rows()));
    if (n_train < 2 || n_train >= data.rows()) {
        throw ShapeError("chronological_split: " + std::to_string(data.rows()) + " rows are too few");
    }
    return {data.head(n_train), data.tail_from(n_train)};
}

}  // namespace epf::featsel
