#include "epf/featsel/lasso.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epf::featsel {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double lasso_lambda_max(const Matrix& x, const Vector& y) { return 2.0 * (x.transpose() * y).cwiseAbs().maxCoeff(); }

LassoFit lasso_fit(const Matrix& x, const Vector& y, double lambda, const LassoConfig& config,
                   const Vector* warm_start) {
    if (x.rows() != y.size()) {
        throw ShapeError("lasso_fit: need one target per row");
    }
    if (lambda < 0) {
        throw ConfigError("lasso_fit: lambda must be non-negative");
    }
    const Eigen::Index p = x.cols();
    LassoFit fit;
    fit.beta = warm_start ? *warm_start : Vector::Zero(p);
    if (fit.beta.size() != p) {
        throw ShapeError("lasso_fit: warm start has the wrong length");
    }
    const Eigen::VectorXd norms = x.colwise().squaredNorm().transpose();
    Vector r = y - x * fit.beta;
    for (fit.sweeps = 0; fit.sweeps < config.max_sweeps;) {
        ++fit.sweeps;
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (norms(j) == 0.0) {
                continue;
            }
            const double old = fit.beta(j);
            const double rho = x.col(j).dot(r) + norms(j) * old;
            const double next = soft_threshold(rho, lambda / 2.0) / norms(j);
            if (next != old) {
                r -= x.col(j) * (next - old);
                fit.beta(j) = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        if (max_change < config.tolerance) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

FeatureMask lasso_select(const SelectionData& data, double lambda, std::size_t k) {
    const auto d = static_cast<std::size_t>(data.x.cols());
    if (k > d) {
        throw ConfigError("lasso_select: k exceeds the feature count");
    }
    Matrix z = data.x;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        z.col(j).array() -= z.col(j).mean();
        const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(z.rows()));
        if (sd > 0) z.col(j) /= sd; else z.col(j).setZero();
    }
    const Vector t = data.y.array() - data.y.mean();

    const auto base = lasso_fit(z, t, lambda);
    std::vector<std::size_t> chosen;
    auto take_ranked = [&](const Vector& beta) {
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(beta(static_cast<Eigen::Index>(a))) > std::abs(beta(static_cast<Eigen::Index>(b)));
        });
        for (auto j : order) {
            if (chosen.size() == k) break;
            if (beta(static_cast<Eigen::Index>(j)) != 0.0 &&
                std::find(chosen.begin(), chosen.end(), j) == chosen.end()) {
                chosen.push_back(j);
            }
        }
    };
    take_ranked(base.beta);
    Vector beta = base.beta;
    double path_lambda = lambda;
    // Halve lambda until enough coefficients enter; stop once the penalty is negligible.
    while (chosen.size() < k && path_lambda > 1e-12) {
        path_lambda /= 2.0;
        beta = lasso_fit(z, t, path_lambda, {}, &beta).beta;
        take_ranked(beta);
    }
    // Columns that never enter (constant inputs) fill by index.
    for (std::size_t j = 0; j < d && chosen.size() < k; ++j) {
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
    }
    Bits bits(d, 0);
    for (auto j : chosen) bits[j] = 1;
    auto mask = FeatureMask::from_bits(bits, "lasso");
    mask.scores.assign(base.beta.data(), base.beta.data() + base.beta.size());
    return mask;
}

}  // namespace epf::featsel
