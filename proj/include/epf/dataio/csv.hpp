#pragma once

#include "epf/dataio/table.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace epf::dataio {

// Daily files:  timestamp,F1,...,F62,target
// Hourly files: timestamp,hour,<feature columns>,<target>,cap_F47,...,cap_F54
//
// Feature columns may be any subset of the catalog, in any order; hourly files
// may not carry the derived deviation columns F55..F62. Empty fields are
// missing values. Daily stamps must be strictly increasing; hourly stamps may
// repeat (daylight-saving duplicates, removed by clean()) but never decrease.
TimeSeriesTable load_csv(const std::filesystem::path& path, Granularity granularity);
TimeSeriesTable read_csv(std::istream& in, Granularity granularity);

// Columns are written in canonical order (features by id, targets, capacities)
// using shortest round-trip number formatting.
void write_csv(const TimeSeriesTable& table, std::ostream& out);
std::string to_csv(const TimeSeriesTable& table);

// Reorders columns to canonical order.
TimeSeriesTable canonical_order(const TimeSeriesTable& table);

// Shortest round-trip representation; NaN becomes an empty string.
std::string format_number(double value);

}  // namespace epf::dataio
