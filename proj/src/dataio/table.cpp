#include "epf/dataio/table.hpp"

#include "epf/errors.hpp"

#include <charconv>
#include <cstdio>
#include <set>

namespace epf::dataio {

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        const char* first = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(first, first + len, v);
        if (ec != std::errc() || ptr != first + len) {
            return std::nullopt;
        }
        return v;
    };
    const auto y = number(0, 4);
    const auto m = number(5, 2);
    const auto d = number(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return ymd;
}

std::string format_date(std::chrono::year_month_day date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::string to_string(const Timestamp& ts) {
    auto s = format_date(ts.date);
    if (ts.hour >= 0) {
        s += " h" + std::to_string(ts.hour);
    }
    return s;
}

std::optional<std::size_t> TimeSeriesTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t TimeSeriesTable::index_of(std::string_view name) const {
    if (const auto idx = find(name)) {
        return *idx;
    }
    throw SchemaError("unknown column '" + std::string(name) + "'");
}

const std::vector<double>& TimeSeriesTable::column(std::string_view name) const {
    return columns[index_of(name)];
}

void TimeSeriesTable::add_column(std::string name, std::vector<double> values) {
    if (find(name)) {
        throw SchemaError("duplicate column '" + name + "'");
    }
    if (values.size() != rows()) {
        throw ShapeError("column '" + name + "' has " + std::to_string(values.size()) +
                         " rows, table has " + std::to_string(rows()));
    }
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

void TimeSeriesTable::validate_shape() const {
    if (names.size() != columns.size()) {
        throw ShapeError("column name count differs from column count");
    }
    std::set<std::string_view> seen;
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (!seen.insert(names[c]).second) {
            throw SchemaError("duplicate column '" + names[c] + "'");
        }
        if (columns[c].size() != stamps.size()) {
            throw ShapeError("column '" + names[c] + "' length mismatch");
        }
    }
}

TimeSeriesTable slice_rows(const TimeSeriesTable& table, RowRange rows) {
    if (rows.end > table.rows() || rows.begin > rows.end) {
        throw ShapeError("row range out of bounds");
    }
    TimeSeriesTable out;
    out.granularity = table.granularity;
    out.names = table.names;
    out.stamps.assign(table.stamps.begin() + static_cast<std::ptrdiff_t>(rows.begin),
                      table.stamps.begin() + static_cast<std::ptrdiff_t>(rows.end));
    for (const auto& col : table.columns) {
        out.columns.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(rows.begin),
                                 col.begin() + static_cast<std::ptrdiff_t>(rows.end));
    }
    return out;
}

}  // namespace epf::dataio
