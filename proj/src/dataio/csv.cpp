#include "epf/dataio/csv.hpp"

#include "epf/dataio/catalog.hpp"
#include "epf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace epf::dataio {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}

bool is_capacity_column(std::string_view name) {
    if (name.substr(0, 4) != "cap_") {
        return false;
    }
    const auto idx = feature_index(name.substr(4));
    return idx && *idx >= kFirstFlow && *idx < kFirstFlow + kInterconnectorCount;
}

// Sort key for canonical column order.
std::size_t column_rank(std::string_view name) {
    if (const auto idx = feature_index(name)) {
        return *idx;
    }
    if (name == kTargetColumn) {
        return 100;
    }
    if (is_target_column(name)) {
        return 101 + static_cast<std::size_t>((name[8] - '0') * 10 + (name[9] - '0'));
    }
    if (is_capacity_column(name)) {
        return 200 + *feature_index(name.substr(4));
    }
    return 1000;
}

void check_column(std::string_view name, Granularity granularity) {
    if (const auto idx = feature_index(name)) {
        if (granularity == Granularity::kHourly && *idx >= kFirstFlowDeviation) {
            throw SchemaError("column '" + std::string(name) +
                              "' is derived during daily aggregation and may not appear in "
                              "hourly input");
        }
        return;
    }
    if (is_target_column(name)) {
        return;
    }
    if (granularity == Granularity::kHourly && is_capacity_column(name)) {
        return;
    }
    throw SchemaError("unknown column '" + std::string(name) + "'");
}

double parse_value(std::string_view field, std::size_t line, std::string_view column) {
    field = trim(field);
    if (field.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const char* first = field.data();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError("column '" + std::string(column) + "': not a number: '" +
                         std::string(field) + "'",
                         line);
    }
    return v;
}

}  // namespace

TimeSeriesTable read_csv(std::istream& in, Granularity granularity) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty file", 1);
    }
    ++line_no;
    std::string_view header = line;
    if (header.substr(0, 3) == "\xEF\xBB\xBF") {
        header.remove_prefix(3);
    }
    auto head = split_fields(trim(header));
    const std::size_t lead = granularity == Granularity::kDaily ? 1 : 2;
    if (trim(head[0]) != "timestamp" ||
        (granularity == Granularity::kHourly && (head.size() < 2 || trim(head[1]) != "hour"))) {
        throw SchemaError(granularity == Granularity::kDaily
                              ? "daily header must start with 'timestamp'"
                              : "hourly header must start with 'timestamp,hour'");
    }
    TimeSeriesTable table;
    table.granularity = granularity;
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = lead; i < head.size(); ++i) {
        const auto name = trim(head[i]);
        check_column(name, granularity);
        if (!seen.insert(std::string(name)).second) {
            throw SchemaError("duplicate column '" + std::string(name) + "'");
        }
        table.names.emplace_back(name);
    }
    table.columns.resize(table.names.size());

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto fields = split_fields(body);
        if (fields.size() != head.size()) {
            throw ParseError("expected " + std::to_string(head.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        Timestamp ts;
        const auto date = parse_date(trim(fields[0]));
        if (!date) {
            throw ParseError("malformed date '" + std::string(fields[0]) + "'", line_no);
        }
        ts.date = *date;
        if (granularity == Granularity::kHourly) {
            const auto h = trim(fields[1]);
            int hour = -1;
            const auto [ptr, ec] = std::from_chars(h.data(), h.data() + h.size(), hour);
            if (ec != std::errc() || ptr != h.data() + h.size() || hour < 0 || hour > 23) {
                throw ParseError("malformed hour '" + std::string(h) + "'", line_no);
            }
            ts.hour = hour;
        }
        if (!table.stamps.empty()) {
            const auto& prev = table.stamps.back();
            const bool bad = granularity == Granularity::kDaily ? !(prev < ts) : ts < prev;
            if (bad) {
                throw OrderingError("line " + std::to_string(line_no) + ": timestamp " +
                                    to_string(ts) + " does not follow " + to_string(prev));
            }
        }
        table.stamps.push_back(ts);
        for (std::size_t c = 0; c < table.names.size(); ++c) {
            table.columns[c].push_back(parse_value(fields[lead + c], line_no, table.names[c]));
        }
    }
    return table;
}

TimeSeriesTable load_csv(const std::filesystem::path& path, Granularity granularity) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return read_csv(in, granularity);
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return {};
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

TimeSeriesTable canonical_order(const TimeSeriesTable& table) {
    std::vector<std::size_t> order(table.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return column_rank(table.names[a]) < column_rank(table.names[b]);
    });
    TimeSeriesTable out;
    out.granularity = table.granularity;
    out.stamps = table.stamps;
    for (const auto c : order) {
        out.names.push_back(table.names[c]);
        out.columns.push_back(table.columns[c]);
    }
    return out;
}

void write_csv(const TimeSeriesTable& input, std::ostream& out) {
    const auto table = canonical_order(input);
    out << "timestamp";
    if (table.granularity == Granularity::kHourly) {
        out << ",hour";
    }
    for (const auto& name : table.names) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << format_date(table.stamps[r].date);
        if (table.granularity == Granularity::kHourly) {
            out << ',' << table.stamps[r].hour;
        }
        for (const auto& col : table.columns) {
            out << ',' << format_number(col[r]);
        }
        out << '\n';
    }
}

std::string to_csv(const TimeSeriesTable& table) {
    std::ostringstream out;
    write_csv(table, out);
    return out.str();
}

}  // namespace epf::dataio
