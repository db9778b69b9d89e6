#pragma once

#include "epf/dataio/table.hpp"
#include "epf/numkernel/matrix.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace epf::models {

using numkernel::Matrix;
using numkernel::Vector;

// Regressors for y(t): y(t-1..t-ny), x_j(t..t-nx+1), e(t-1..t-ne) and an intercept.
struct NarmaxOrder {
    std::size_t ny = 1;
    std::size_t nx = 1;
    std::size_t ne = 1;
    int degree = 1;

    // First target index with every lag available.
    std::size_t max_lag() const;
    bool operator==(const NarmaxOrder&) const = default;
};

struct NarmaxFitConfig {
    std::size_t max_iterations = 20;
    double tolerance = 1e-6;  // on the largest coefficient change
};

/// Degree 2 adds every pairwise product (squares included) of the
/// autoregressive and residual terms, plus the square of each exogenous term.
/// Exogenous cross-products are left out: with 62 inputs they would outnumber
/// the training days.
struct NarmaxModel {
    NarmaxOrder order;
    std::size_t exogenous = 0;
    Vector coefficients;
    std::vector<std::string> terms;
    std::size_t iterations = 0;
    bool converged = false;

    /// One-step-ahead prediction of y(t) from observed history; residual terms are zero.
    double predict(std::span<const double> y, const Matrix& x, std::size_t t) const;
    std::vector<double> predict(std::span<const double> y, const Matrix& x, dataio::RowRange targets) const;
};

/// Extended least squares on targets t in `rows` (t >= order.max_lag()):
/// fit with zero residual regressors, recompute residuals, refit with them, and
/// repeat until the coefficients settle or max_iterations is reached. The last
/// iterate is returned either way; `converged` records which.
NarmaxModel narmax_fit(std::span<const double> y, const Matrix& x, dataio::RowRange rows, const NarmaxOrder& order,
                       const NarmaxFitConfig& config = {});

// Regressor row for y(t) given residuals `e` (entries before t are read).
std::vector<double> narmax_regressors(const NarmaxOrder& order, std::span<const double> y, const Matrix& x,
                                      std::span<const double> e, std::size_t t);
std::vector<std::string> narmax_term_names(const NarmaxOrder& order, std::size_t exogenous);

nlohmann::json to_json(const NarmaxModel& model);
NarmaxModel narmax_from_json(const nlohmann::json& j);

}  // namespace epf::models
