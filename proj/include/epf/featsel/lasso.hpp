#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/mask.hpp"

namespace epf::featsel {

inline constexpr double kDefaultLassoLambda = 0.02;

struct LassoConfig {
    double tolerance = 1e-8;  // stop when the largest coefficient change is below this
    std::size_t max_sweeps = 100000;
};

struct LassoFit {
    Vector beta;
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Cyclic coordinate descent on sum (y - X beta)^2 + lambda * sum |beta_j|
/// (no intercept): beta_j <- S(x_j' r_j, lambda / 2) / (x_j' x_j), with r_j
/// the residual excluding feature j. Zero columns keep beta_j = 0.
LassoFit lasso_fit(const Matrix& x, const Vector& y, double lambda, const LassoConfig& config = {},
                   const Vector* warm_start = nullptr);

// Smallest lambda with beta = 0: max_j |2 x_j' y|.
double lasso_lambda_max(const Matrix& x, const Vector& y);

double soft_threshold(double z, double gamma);

/// Lasso selection on centered, unit-variance inputs and a centered target.
/// Takes the top-k nonzero coefficients by |beta|; when fewer than k are
/// nonzero, pads with the largest |beta| from a halving-lambda path. Scores
/// hold beta at `lambda` in the scaled space.
FeatureMask lasso_select(const SelectionData& data, double lambda = kDefaultLassoLambda,
                         std::size_t k = kDefaultSelected);

}  // namespace epf::featsel
