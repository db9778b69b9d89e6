#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/mask.hpp"

namespace epf::featsel {

struct SvrConfig {
    double c = 1.0;
    double epsilon = 0.1;
    double tolerance = 1e-6;  // maximal KKT violation at termination
    std::size_t max_iterations = 1000000;
};

// Ranking only needs the ordering of |w|, so elimination fits stop at the usual SMO tolerance.
inline constexpr SvrConfig kRfeSvrConfig{.c = 1.0, .epsilon = 0.1, .tolerance = 1e-3, .max_iterations = 1000000};

/// Linear epsilon-SVR: min 0.5 |w|^2 + C sum(xi + xi*) subject to
/// y - w.x - b <= eps + xi, w.x + b - y <= eps + xi*, xi, xi* >= 0.
struct SvrModel {
    Vector w;
    double b = 0.0;
    double c = 0.0;
    double epsilon = 0.0;
    Vector xi;       // slack above the tube
    Vector xi_star;  // slack below the tube
    std::size_t iterations = 0;

    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    Vector predict(const Matrix& x) const;
    double primal_objective() const;
};

// Primal objective for arbitrary (w, b) on (x, y).
double svr_primal_objective(const Vector& w, double b, const Matrix& x, const Vector& y, double c, double epsilon);

/// Solves the dual by SMO with second-order working-set selection over the
/// 2n box-constrained variables. C = 0 gives w = 0 and b = median(y).
/// Throws SolverError (carrying the KKT violation) after max_iterations.
SvrModel svr_fit(const Matrix& x, const Vector& y, const SvrConfig& config = {});

struct RfeResult {
    FeatureMask mask;
    // Features in elimination order (first dropped first); survivors are not listed.
    std::vector<std::size_t> elimination_order;
};

/// Recursive feature elimination with a linear SVR. Inputs are standardized
/// (constant columns become zero) and the target is standardized before each
/// fit. Each round drops the `drop_per_round` surviving features with the
/// smallest |w_j| (ties drop the higher index) until k remain. Scores hold the
/// 1-based elimination round, survivors scoring rounds + 1.
RfeResult rfe_svr_select(const SelectionData& data, std::size_t k = kDefaultSelected,
                         std::size_t drop_per_round = 1, const SvrConfig& config = kRfeSvrConfig);

}  // namespace epf::featsel
