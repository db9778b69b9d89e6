#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epf::dataio {

enum class Granularity { kHourly, kDaily };

struct Timestamp {
    std::chrono::year_month_day date{};
    int hour = -1;  // 0..23 for hourly rows, -1 for daily rows

    auto operator<=>(const Timestamp&) const = default;
};

// "2019-12-31"; throws nothing, returns nullopt on malformed input.
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);
std::string to_string(const Timestamp& ts);

// Half-open row interval [begin, end).
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end > begin ? end - begin : 0; }
    bool empty() const { return end <= begin; }
    bool contains(std::size_t row) const { return row >= begin && row < end; }
    bool operator==(const RowRange&) const = default;
};

// Dated rows of named real-valued columns. Missing values are NaN until the
// table has gone through clean().
struct TimeSeriesTable {
    Granularity granularity = Granularity::kDaily;
    std::vector<Timestamp> stamps;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return stamps.size(); }
    std::size_t cols() const { return names.size(); }

    std::optional<std::size_t> find(std::string_view name) const;
    // Throws SchemaError when the column is absent.
    std::size_t index_of(std::string_view name) const;
    const std::vector<double>& column(std::string_view name) const;

    void add_column(std::string name, std::vector<double> values);

    // Checks equal column lengths and unique names; throws ShapeError/SchemaError.
    void validate_shape() const;

    bool operator==(const TimeSeriesTable&) const = default;
};

// Row subset copy.
TimeSeriesTable slice_rows(const TimeSeriesTable& table, RowRange rows);

}  // namespace epf::dataio
