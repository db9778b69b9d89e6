#pragma once

#include "epf/neural/network.hpp"

namespace epf::neural {

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_block;  // "<layer>.<name>"
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// Compares backprop gradients of the batch MSE against central differences
/// with step `h` for every parameter. Relative error per entry is
/// |a - n| / max(|a| + |n|, 1e-5).
GradCheckResult gradient_check(Network& net, std::span<const Matrix> windows, std::span<const double> targets,
                               double h = 1e-5);

}  // namespace epf::neural
