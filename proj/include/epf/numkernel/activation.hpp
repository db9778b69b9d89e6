#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace epf::numkernel {

enum class Activation { kSigmoid, kTanh };

// Overflow-free logistic function.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        const double z = std::exp(-x);
        return 1.0 / (1.0 + z);
    }
    const double z = std::exp(x);
    return z / (1.0 + z);
}

std::vector<double> activate(std::span<const double> x, Activation kind);

}  // namespace epf::numkernel
