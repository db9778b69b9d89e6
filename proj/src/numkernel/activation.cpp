#include "epf/numkernel/activation.hpp"

namespace epf::numkernel {

std::vector<double> activate(std::span<const double> x, Activation kind) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = kind == Activation::kSigmoid ? sigmoid(x[i]) : std::tanh(x[i]);
    }
    return out;
}

}  // namespace epf::numkernel
