#include "epf/featsel/elm.hpp"

#include "epf/errors.hpp"
#include "epf/numkernel/activation.hpp"
#include "epf/numkernel/linalg.hpp"

namespace epf::featsel {

ElmModel::ElmModel(std::size_t features, std::size_t hidden, numkernel::Rng& rng) {
    if (features == 0 || hidden == 0) {
        throw ConfigError("elm: feature and hidden counts must be positive");
    }
    w1_.resize(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(hidden));
    b_.resize(1, static_cast<Eigen::Index>(hidden));
    for (Eigen::Index k = 0; k < w1_.size(); ++k) {
        w1_.data()[k] = rng.uniform(-1.0, 1.0);
    }
    for (Eigen::Index k = 0; k < b_.size(); ++k) {
        b_.data()[k] = rng.uniform(-1.0, 1.0);
    }
    mask_.assign(features, 1);
}

Matrix ElmModel::hidden_activations(const Matrix& x) const {
    if (x.cols() != w1_.rows()) {
        throw ShapeError("elm: input has " + std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(w1_.rows()));
    }
    Matrix masked = x;
    for (Eigen::Index j = 0; j < masked.cols(); ++j) {
        if (!mask_[static_cast<std::size_t>(j)]) {
            masked.col(j).setZero();
        }
    }
    Matrix h = masked * w1_;
    h.rowwise() += b_.row(0);
    return h.unaryExpr([](double v) { return numkernel::sigmoid(v); });
}

void ElmModel::fit(const Bits& mask, const Matrix& x, const Vector& y) {
    if (mask.size() != static_cast<std::size_t>(w1_.rows())) {
        throw ShapeError("elm: mask length mismatch");
    }
    if (popcount(mask) == 0) {
        throw ConfigError("elm: mask selects no features");
    }
    mask_ = mask;
    w2_ = numkernel::least_squares(hidden_activations(x), y);
}

Vector ElmModel::predict(const Matrix& x) const {
    if (w2_.size() == 0) {
        throw ConfigError("elm: predict before fit");
    }
    return hidden_activations(x) * w2_;
}

double ElmModel::mse(const Matrix& x, const Vector& y) const {
    return (predict(x) - y).squaredNorm() / static_cast<double>(y.size());
}

double elm_fitness(ElmModel& model, const Bits& mask, const SelectionData& train, const SelectionData& validation) {
    model.fit(mask, train.x, train.y);
    return model.mse(validation.x, validation.y);
}

}  // namespace epf::featsel
