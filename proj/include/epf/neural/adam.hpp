#pragma once

#include "epf/neural/layer.hpp"

#include <vector>

namespace epf::neural {

struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t step = 0;
    std::vector<Matrix> m;  // first moments, one per parameter block
    std::vector<Matrix> v;  // second moments
};

// One bias-corrected Adam update of every block in `params` from its grad.
// Moments are created on the first call; later calls require the same shapes.
void adam_step(AdamState& state, const std::vector<ParamRef>& params);

}  // namespace epf::neural
