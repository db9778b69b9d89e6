#pragma once

#include "epf/dataio/catalog.hpp"
#include "epf/dataio/table.hpp"

#include <span>

namespace epf::dataio {

// Removes repeated stamps (daylight-saving duplicates, first occurrence kept),
// inserts rows for absent days/hours between the first and last stamp, and
// fills every missing value by linear interpolation between its nearest
// present neighbours. A missing value at either end of a column throws
// IncompleteError. Idempotent.
TimeSeriesTable clean(const TimeSeriesTable& table);

// Root-mean-square deviation of hourly flow from hourly expected capacity:
// sqrt(sum_i (flow_i - capacity_i)^2 / N) with N the number of hours (24 for
// a full day).
double flow_deviation(std::span<const double> hourly_flow, std::span<const double> hourly_capacity);

struct AggregateOptions {
    // Also emit target_h00..target_h23 from the hourly `target` column.
    bool hourly_targets = false;
};

// Hourly -> daily. Price and fx columns are averaged over the 24 hours;
// production, consumption, their prognoses and flows are summed; each
// flow/capacity pair yields its deviation column F55..F62. Capacity columns
// are consumed. Any day without exactly 24 rows throws IncompleteError.
TimeSeriesTable aggregate_daily(const TimeSeriesTable& hourly,
                                const std::array<FeatureInfo, kFeatureCount>& catalog,
                                const AggregateOptions& options = {});

}  // namespace epf::dataio
