#pragma once

#include "epf/dataio/table.hpp"
#include "epf/numkernel/matrix.hpp"

#include <string_view>

namespace epf::featsel {

using numkernel::Matrix;
using numkernel::Vector;

/// Design matrix for the selectors: one row per target day, the 62 catalog
/// features in catalog order taken `lag` rows before the target (the day-ahead
/// information set).
struct SelectionData {
    Matrix x;  // n x 62
    Vector y;  // n

    std::size_t rows() const { return static_cast<std::size_t>(y.size()); }
    std::size_t features() const { return static_cast<std::size_t>(x.cols()); }

    // Targets at rows [rows.begin + lag, rows.end); features `lag` rows earlier.
    static SelectionData from_table(const dataio::TimeSeriesTable& table, dataio::RowRange rows,
                                    std::string_view target_column, std::size_t lag = 1);

    SelectionData head(std::size_t n) const;
    SelectionData tail_from(std::size_t start) const;
};

// Chronological split: first floor(train_fraction * n) rows, then the rest.
std::pair<SelectionData, SelectionData> chronological_split(const SelectionData& data,
                                                            double train_fraction = 0.8);

}  // namespace epf::featsel
