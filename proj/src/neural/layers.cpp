#include "epf/neural/layers.hpp"

#include "epf/errors.hpp"

#include <cmath>

namespace epf::neural {

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, numkernel::Rng& rng) {
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        m.data()[k] = rng.uniform(-bound, bound);
    }
    return m;
}

void apply_activation(Matrix& z, DenseActivation act) {
    switch (act) {
        case DenseActivation::kLinear: break;
        case DenseActivation::kRelu: z = z.cwiseMax(0.0); break;
        case DenseActivation::kTanh: z = z.array().tanh().matrix(); break;
    }
}

// Gradient w.r.t. the pre-activation given the activated output y.
Matrix activation_backward(const Matrix& grad, const Matrix& y, DenseActivation act) {
    switch (act) {
        case DenseActivation::kLinear: return grad;
        case DenseActivation::kRelu: return (grad.array() * (y.array() > 0.0).cast<double>()).matrix();
        case DenseActivation::kTanh: return (grad.array() * (1.0 - y.array().square())).matrix();
    }
    return grad;
}

}  // namespace

// ---- Dense ----

DenseLayer::DenseLayer(Matrix weight, Matrix bias, DenseActivation act)
    : w_(std::move(weight)), b_(std::move(bias)), act_(act) {
    dw_ = Matrix::Zero(w_.rows(), w_.cols());
    db_ = Matrix::Zero(b_.rows(), b_.cols());
}

DenseLayer DenseLayer::random(std::size_t in, std::size_t units, DenseActivation act, numkernel::Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    auto w = uniform_matrix(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(units), bound, rng);
    auto b = uniform_matrix(1, static_cast<Eigen::Index>(units), bound, rng);
    return DenseLayer(std::move(w), std::move(b), act);
}

LayerSpec DenseLayer::spec() const { return LayerSpec::dense(static_cast<std::size_t>(w_.cols()), act_); }

Shape DenseLayer::output_shape(Shape in) const {
    if (in.width != static_cast<std::size_t>(w_.rows())) {
        throw ShapeError("dense: input width " + std::to_string(in.width) + ", expected " +
                         std::to_string(w_.rows()));
    }
    return {in.steps, static_cast<std::size_t>(w_.cols())};
}

Sequence DenseLayer::forward(const Sequence& in) {
    in_ = in;
    out_.clear();
    for (const auto& x : in) {
        if (x.cols() != w_.rows()) {
            throw ShapeError("dense: input width mismatch");
        }
        Matrix z = x * w_;
        z.rowwise() += b_.row(0);
        apply_activation(z, act_);
        out_.push_back(std::move(z));
    }
    return out_;
}

Sequence DenseLayer::backward(const Sequence& grad_out) {
    Sequence dx(grad_out.size());
    for (std::size_t t = 0; t < grad_out.size(); ++t) {
        const Matrix dz = activation_backward(grad_out[t], out_[t], act_);
        dw_.noalias() += in_[t].transpose() * dz;
        db_ += dz.colwise().sum();
        dx[t] = dz * w_.transpose();
    }
    return dx;
}

std::vector<ParamRef> DenseLayer::params() { return {{"weight", &w_, &dw_}, {"bias", &b_, &db_}}; }

std::unique_ptr<Layer> DenseLayer::clone() const { return std::make_unique<DenseLayer>(*this); }

// ---- Conv1d ----

Conv1dLayer::Conv1dLayer(std::size_t channels, std::size_t filters, std::size_t kernel, DenseActivation act,
                         numkernel::Rng& rng)
    : channels_(channels), filters_(filters), kernel_(kernel), act_(act) {
    if (kernel == 0 || filters == 0) {
        throw ConfigError("conv1d: kernel and filters must be positive");
    }
    const auto fan_in = static_cast<Eigen::Index>(kernel * channels);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    w_ = uniform_matrix(fan_in, static_cast<Eigen::Index>(filters), bound, rng);
    b_ = uniform_matrix(1, static_cast<Eigen::Index>(filters), bound, rng);
    dw_ = Matrix::Zero(w_.rows(), w_.cols());
    db_ = Matrix::Zero(1, w_.cols());
}

LayerSpec Conv1dLayer::spec() const { return LayerSpec::conv1d(filters_, kernel_, act_); }

Shape Conv1dLayer::output_shape(Shape in) const {
    if (in.width != channels_) {
        throw ShapeError("conv1d: input width " + std::to_string(in.width) + ", expected " +
                         std::to_string(channels_));
    }
    if (in.steps < kernel_) {
        throw ShapeError("conv1d: " + std::to_string(in.steps) + " steps shorter than kernel " +
                         std::to_string(kernel_));
    }
    return {in.steps - kernel_ + 1, filters_};
}

Sequence Conv1dLayer::forward(const Sequence& in) {
    output_shape({in.size(), in.empty() ? 0 : static_cast<std::size_t>(in.front().cols())});
    in_steps_ = in.size();
    const auto batch = in.front().rows();
    const auto c = static_cast<Eigen::Index>(channels_);
    windows_.clear();
    out_.clear();
    for (std::size_t t = 0; t + kernel_ <= in.size(); ++t) {
        Matrix window(batch, static_cast<Eigen::Index>(kernel_) * c);
        for (std::size_t k = 0; k < kernel_; ++k) {
            window.middleCols(static_cast<Eigen::Index>(k) * c, c) = in[t + k];
        }
        Matrix z = window * w_;
        z.rowwise() += b_.row(0);
        apply_activation(z, act_);
        windows_.push_back(std::move(window));
        out_.push_back(std::move(z));
    }
    return out_;
}

Sequence Conv1dLayer::backward(const Sequence& grad_out) {
    const auto batch = windows_.front().rows();
    const auto c = static_cast<Eigen::Index>(channels_);
    Sequence dx(in_steps_, Matrix::Zero(batch, c));
    for (std::size_t t = 0; t < grad_out.size(); ++t) {
        const Matrix dz = activation_backward(grad_out[t], out_[t], act_);
        dw_.noalias() += windows_[t].transpose() * dz;
        db_ += dz.colwise().sum();
        const Matrix dwin = dz * w_.transpose();
        for (std::size_t k = 0; k < kernel_; ++k) {
            dx[t + k] += dwin.middleCols(static_cast<Eigen::Index>(k) * c, c);
        }
    }
    return dx;
}

std::vector<ParamRef> Conv1dLayer::params() { return {{"weight", &w_, &dw_}, {"bias", &b_, &db_}}; }

std::unique_ptr<Layer> Conv1dLayer::clone() const { return std::make_unique<Conv1dLayer>(*this); }

// ---- MaxPool ----

Shape MaxPoolLayer::output_shape(Shape in) const {
    if (width_ == 0 || in.steps < width_) {
        throw ShapeError("maxpool: " + std::to_string(in.steps) + " steps shorter than window " +
                         std::to_string(width_));
    }
    return {in.steps / width_, in.width};
}

Sequence MaxPoolLayer::forward(const Sequence& in) {
    output_shape({in.size(), in.empty() ? 0 : static_cast<std::size_t>(in.front().cols())});
    in_steps_ = in.size();
    const std::size_t out_steps = in.size() / width_;
    Sequence out;
    argmax_.assign(out_steps, {});
    for (std::size_t s = 0; s < out_steps; ++s) {
        Matrix best = in[s * width_];
        auto& arg = argmax_[s];
        arg.assign(static_cast<std::size_t>(best.size()), s * width_);
        for (std::size_t k = 1; k < width_; ++k) {
            const Matrix& x = in[s * width_ + k];
            for (Eigen::Index e = 0; e < best.size(); ++e) {
                if (x.data()[e] > best.data()[e]) {
                    best.data()[e] = x.data()[e];
                    arg[static_cast<std::size_t>(e)] = s * width_ + k;
                }
            }
        }
        out.push_back(std::move(best));
    }
    return out;
}

Sequence MaxPoolLayer::backward(const Sequence& grad_out) {
    const auto rows = grad_out.front().rows();
    const auto cols = grad_out.front().cols();
    Sequence dx(in_steps_, Matrix::Zero(rows, cols));
    for (std::size_t s = 0; s < grad_out.size(); ++s) {
        for (Eigen::Index e = 0; e < grad_out[s].size(); ++e) {
            dx[argmax_[s][static_cast<std::size_t>(e)]].data()[e] += grad_out[s].data()[e];
        }
    }
    return dx;
}

// ---- Flatten ----

Sequence FlattenLayer::forward(const Sequence& in) {
    if (in.empty()) {
        throw ShapeError("flatten: empty input");
    }
    steps_ = in.size();
    width_ = static_cast<std::size_t>(in.front().cols());
    const auto w = static_cast<Eigen::Index>(width_);
    Matrix out(in.front().rows(), static_cast<Eigen::Index>(steps_) * w);
    for (std::size_t t = 0; t < steps_; ++t) {
        out.middleCols(static_cast<Eigen::Index>(t) * w, w) = in[t];
    }
    return {out};
}

Sequence FlattenLayer::backward(const Sequence& grad_out) {
    const auto w = static_cast<Eigen::Index>(width_);
    Sequence dx(steps_);
    for (std::size_t t = 0; t < steps_; ++t) {
        dx[t] = grad_out.front().middleCols(static_cast<Eigen::Index>(t) * w, w);
    }
    return dx;
}

// ---- Repeat ----

Shape RepeatLayer::output_shape(Shape in) const {
    if (in.steps != 1) {
        throw ShapeError("repeat: expects a single-step input, got " + std::to_string(in.steps) + " steps");
    }
    return {n_, in.width};
}

Sequence RepeatLayer::forward(const Sequence& in) {
    if (in.size() != 1) {
        throw ShapeError("repeat: expects a single-step input");
    }
    return Sequence(n_, in.front());
}

Sequence RepeatLayer::backward(const Sequence& grad_out) {
    Matrix sum = grad_out.front();
    for (std::size_t t = 1; t < grad_out.size(); ++t) {
        sum += grad_out[t];
    }
    return {sum};
}

}  // namespace epf::neural
