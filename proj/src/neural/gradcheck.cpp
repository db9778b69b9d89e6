#include "epf/neural/gradcheck.hpp"

#include "epf/errors.hpp"

#include <cmath>
#include <numeric>

namespace epf::neural {

namespace {

double batch_mse(Network& net, const Sequence& batch, std::span<const double> targets) {
    const Matrix y = net.forward(batch);
    double s = 0.0;
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const double e = y(r, 0) - targets[static_cast<std::size_t>(r)];
        s += e * e;
    }
    return s / static_cast<double>(y.rows());
}

}  // namespace

GradCheckResult gradient_check(Network& net, std::span<const Matrix> windows, std::span<const double> targets,
                               double h) {
    if (windows.size() != targets.size() || windows.empty()) {
        throw ShapeError("gradient_check: need one target per window");
    }
    std::vector<std::size_t> rows(windows.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const Sequence batch = make_batch(windows, rows);

    net.zero_grad();
    const Matrix y = net.forward(batch);
    Matrix grad(y.rows(), 1);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        grad(r, 0) = 2.0 * (y(r, 0) - targets[static_cast<std::size_t>(r)]) / static_cast<double>(y.rows());
    }
    net.backward(grad);

    GradCheckResult result;
    auto params = net.params();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < net.spec().layers.size(); ++i) {
        for (auto& p : net.layer(i).params()) {
            labels.push_back(std::to_string(i) + "." + p.name);
        }
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& value = *params[k].value;
        const Matrix analytic = *params[k].grad;
        for (Eigen::Index e = 0; e < value.size(); ++e) {
            const double saved = value.data()[e];
            value.data()[e] = saved + h;
            const double up = batch_mse(net, batch, targets);
            value.data()[e] = saved - h;
            const double down = batch_mse(net, batch, targets);
            value.data()[e] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic.data()[e];
            const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-5);
            ++result.checked;
            if (rel > result.max_relative_error || !std::isfinite(rel)) {
                result.max_relative_error = std::isfinite(rel) ? rel : std::numeric_limits<double>::infinity();
                result.worst_block = labels[k];
                result.worst_index = static_cast<std::size_t>(e);
            }
        }
    }
    return result;
}

}  // namespace epf::neural
