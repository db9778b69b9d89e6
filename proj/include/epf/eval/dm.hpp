#pragma once

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace epf::eval {

// Alternative hypothesis of the one-sided test on d = |e1| - |e2|.
enum class DmSide {
    kF2Better,  // H1: E[d] > 0
    kF1Better,  // H1: E[d] < 0
};

struct DmResult {
    double statistic = 0.0;      // small-sample corrected; positive favors F2
    double raw_statistic = 0.0;  // mean(d) / sqrt(var(d) / T)
    double p_value = 1.0;        // one-sided, Student-t with T - 1 degrees of freedom
    DmSide side = DmSide::kF2Better;
    std::size_t n = 0;

    // The forecast the evidence points to: "F2" for a positive statistic, else "F1".
    std::string favors() const { return statistic > 0 ? "F2" : "F1"; }
    // One-sided p-value for the alternative the statistic's sign points to.
    double directional_p() const;
};

/// Horizon-1 Diebold-Mariano test with the Harvey-Leybourne-Newbold factor
/// sqrt((T - 1) / T). Errors are forecast minus actual. Throws ShapeError for
/// unequal lengths or T < 10, and DegenerateError when d has zero variance.
DmResult dm_test(std::span<const double> e1, std::span<const double> e2, DmSide side = DmSide::kF2Better);

// Stars for a one-sided p-value: *** 1%, ** 5%, * 10%, # 15%.
std::string significance_stars(double p_value);

// Statistic to two decimals with stars from the p-value in the direction of its sign.
std::string dm_cell(const DmResult& result);

/// Pairwise table with F1 = row model, F2 = column model; the diagonal is empty.
/// Cells hold the corrected statistic; `p_values` the one-sided p-value in
/// the direction of the statistic's sign.
struct DmMatrix {
    std::vector<std::string> models;
    std::vector<std::vector<double>> statistic;
    std::vector<std::vector<double>> p_values;
    std::vector<std::vector<std::string>> errors;  // per cell, non-empty when the test was degenerate

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// errors[i] holds forecast-minus-actual errors of models[i], all the same length.
DmMatrix dm_matrix(const std::vector<std::string>& models, const std::vector<std::vector<double>>& errors);

}  // namespace epf::eval
