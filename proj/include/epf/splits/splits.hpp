#pragma once

#include "epf/dataio/table.hpp"
#include "epf/numkernel/matrix.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace epf::splits {

using dataio::RowRange;

struct Division {
    RowRange train;
    RowRange validation;
    RowRange test;
};

// Chronological 80-10-10 split: floor(0.8n), floor(0.1n), remainder. n >= 50.
Division initial_division(std::size_t n_rows);

struct Fold {
    RowRange train;
    RowRange validation;
    RowRange test;
    bool operator==(const Fold&) const = default;
};

struct SplitPlan {
    std::vector<Fold> folds;
    bool operator==(const SplitPlan&) const = default;
};

/// Walk-forward nested schedule anchored on the 80-10-10 division.
///
/// The first test block starts where the initial test region starts
/// (floor(0.8n) + floor(0.1n)); each later block follows the previous one.
/// Training expands to all rows before the validation window, which keeps a
/// fixed `val_len` and sits directly before the test block. The final block is
/// truncated at n so that the test blocks tile the test region exactly.
SplitPlan walk_forward_folds(std::size_t n_rows, std::size_t val_len, std::size_t test_len);

nlohmann::json to_json(const SplitPlan& plan);
SplitPlan plan_from_json(const nlohmann::json& j);

struct WindowedDataset {
    std::vector<numkernel::Matrix> inputs;  // window x n_selected each
    std::vector<double> targets;
    std::vector<std::size_t> target_rows;   // table row of each target
    std::vector<std::string> feature_names;
    std::size_t window = 0;

    std::size_t size() const { return targets.size(); }
};

/// Sample for target row t uses feature rows [t - window, t). Samples are
/// produced for every t in [window, rows).
WindowedDataset windowize(const dataio::TimeSeriesTable& table, const std::vector<std::string>& features,
                          std::string_view target_column, std::size_t window);

// Samples whose target row lies in `rows`.
WindowedDataset select_targets(const WindowedDataset& data, RowRange rows);

}  // namespace epf::splits
