#include "epf/dataio/preprocess.hpp"

#include "epf/dataio/csv.hpp"
#include "epf/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace epf::dataio {

namespace {

Timestamp next_slot(const Timestamp& ts) {
    using std::chrono::days;
    using std::chrono::sys_days;
    if (ts.hour < 0) {
        return {std::chrono::year_month_day{sys_days{ts.date} + days{1}}, -1};
    }
    if (ts.hour < 23) {
        return {ts.date, ts.hour + 1};
    }
    return {std::chrono::year_month_day{sys_days{ts.date} + days{1}}, 0};
}

void interpolate(std::vector<double>& col, const std::string& name) {
    const std::size_t n = col.size();
    if (n == 0) {
        return;
    }
    if (std::isnan(col.front()) || std::isnan(col.back())) {
        throw IncompleteError("column '" + name + "' has a missing value at the " +
                              (std::isnan(col.front()) ? "start" : "end") + " of the series");
    }
    std::size_t prev = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::isnan(col[i])) {
            continue;
        }
        if (i - prev > 1) {
            const double span = static_cast<double>(i - prev);
            for (std::size_t k = prev + 1; k < i; ++k) {
                const double w = static_cast<double>(k - prev) / span;
                col[k] = col[prev] + w * (col[i] - col[prev]);
            }
        }
        prev = i;
    }
}

}  // namespace

TimeSeriesTable clean(const TimeSeriesTable& table) {
    table.validate_shape();
    TimeSeriesTable out;
    out.granularity = table.granularity;
    out.names = table.names;
    out.columns.resize(table.cols());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto& ts = table.stamps[r];
        if (!out.stamps.empty()) {
            if (ts == out.stamps.back()) {
                continue;
            }
            if (ts < out.stamps.back()) {
                throw OrderingError("timestamp " + to_string(ts) + " precedes " +
                                    to_string(out.stamps.back()));
            }
            for (auto slot = next_slot(out.stamps.back()); slot < ts; slot = next_slot(slot)) {
                out.stamps.push_back(slot);
                for (auto& col : out.columns) {
                    col.push_back(nan);
                }
            }
        }
        out.stamps.push_back(ts);
        for (std::size_t c = 0; c < table.cols(); ++c) {
            out.columns[c].push_back(table.columns[c][r]);
        }
    }
    for (std::size_t c = 0; c < out.cols(); ++c) {
        interpolate(out.columns[c], out.names[c]);
    }
    return out;
}

double flow_deviation(std::span<const double> hourly_flow, std::span<const double> hourly_capacity) {
    if (hourly_flow.size() != hourly_capacity.size() || hourly_flow.empty()) {
        throw ShapeError("flow_deviation: flow and capacity must have equal, nonzero length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < hourly_flow.size(); ++i) {
        const double diff = hourly_flow[i] - hourly_capacity[i];
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(hourly_flow.size()));
}

TimeSeriesTable aggregate_daily(const TimeSeriesTable& hourly,
                                const std::array<FeatureInfo, kFeatureCount>& catalog,
                                const AggregateOptions& options) {
    if (hourly.granularity != Granularity::kHourly) {
        throw SchemaError("aggregate_daily expects an hourly table");
    }
    hourly.validate_shape();

    // Day boundaries.
    std::vector<std::size_t> day_start;
    for (std::size_t r = 0; r < hourly.rows(); ++r) {
        if (r == 0 || hourly.stamps[r].date != hourly.stamps[r - 1].date) {
            day_start.push_back(r);
        }
    }
    day_start.push_back(hourly.rows());
    TimeSeriesTable daily;
    daily.granularity = Granularity::kDaily;
    for (std::size_t d = 0; d + 1 < day_start.size(); ++d) {
        const auto count = day_start[d + 1] - day_start[d];
        if (count != 24) {
            throw IncompleteError("day " + format_date(hourly.stamps[day_start[d]].date) + " has " +
                                  std::to_string(count) + " hourly rows, expected 24");
        }
        daily.stamps.push_back({hourly.stamps[day_start[d]].date, -1});
    }
    const std::size_t n_days = daily.stamps.size();

    auto reduce = [&](const std::vector<double>& col, bool mean) {
        std::vector<double> out(n_days);
        for (std::size_t d = 0; d < n_days; ++d) {
            double sum = 0.0;
            for (std::size_t r = day_start[d]; r < day_start[d + 1]; ++r) {
                if (std::isnan(col[r])) {
                    throw IncompleteError("missing hourly value on " +
                                          format_date(hourly.stamps[r].date) +
                                          "; run clean() first");
                }
                sum += col[r];
            }
            out[d] = mean ? sum / 24.0 : sum;
        }
        return out;
    };

    for (std::size_t c = 0; c < hourly.cols(); ++c) {
        const auto& name = hourly.names[c];
        if (name.rfind("cap_", 0) == 0) {
            continue;
        }
        if (const auto idx = feature_index(name)) {
            const auto category = catalog[*idx].category;
            if (category == Category::kFlowDeviation) {
                throw SchemaError("column '" + name + "' is derived and may not appear in hourly input");
            }
            const bool mean = category == Category::kPrice || category == Category::kFxRate;
            daily.add_column(name, reduce(hourly.columns[c], mean));
        } else if (is_target_column(name)) {
            daily.add_column(name, reduce(hourly.columns[c], true));
            if (options.hourly_targets && name == kTargetColumn) {
                for (int h = 0; h < 24; ++h) {
                    std::vector<double> values(n_days);
                    for (std::size_t d = 0; d < n_days; ++d) {
                        values[d] = hourly.columns[c][day_start[d] + static_cast<std::size_t>(h)];
                    }
                    daily.add_column(hourly_target_column(h), std::move(values));
                }
            }
        } else {
            throw SchemaError("unknown column '" + name + "'");
        }
    }

    for (std::size_t k = 0; k < kInterconnectorCount; ++k) {
        const auto flow_name = feature_id(kFirstFlow + k);
        const auto cap_name = capacity_column(kFirstFlow + k);
        const auto flow = hourly.find(flow_name);
        const auto cap = hourly.find(cap_name);
        if (!flow && !cap) {
            continue;
        }
        if (!flow || !cap) {
            throw SchemaError("interconnector " + flow_name + " needs both '" + flow_name +
                              "' and '" + cap_name + "' columns");
        }
        std::vector<double> deviation(n_days);
        for (std::size_t d = 0; d < n_days; ++d) {
            const auto begin = static_cast<std::ptrdiff_t>(day_start[d]);
            deviation[d] = flow_deviation(
                std::span<const double>(hourly.columns[*flow].data() + begin, 24),
                std::span<const double>(hourly.columns[*cap].data() + begin, 24));
        }
        daily.add_column(feature_id(kFirstFlowDeviation + k), std::move(deviation));
    }
    return canonical_order(daily);
}

}  // namespace epf::dataio
