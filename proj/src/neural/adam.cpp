#include "epf/neural/adam.hpp"

#include "epf/errors.hpp"

#include <cmath>

namespace epf::neural {

void adam_step(AdamState& state, const std::vector<ParamRef>& params) {
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
            state.v.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
        }
    }
    if (state.m.size() != params.size()) {
        throw ShapeError("adam: parameter block count changed");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& value = *params[k].value;
        const Matrix& grad = *params[k].grad;
        Matrix& m = state.m[k];
        Matrix& v = state.v[k];
        if (grad.rows() != value.rows() || grad.cols() != value.cols() || m.rows() != value.rows() ||
            m.cols() != value.cols()) {
            throw ShapeError("adam: shape mismatch in block '" + params[k].name + "'");
        }
        m = state.beta1 * m + (1.0 - state.beta1) * grad;
        v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
        value.array() -= state.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    }
}

}  // namespace epf::neural
