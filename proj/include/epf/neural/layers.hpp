#pragma once

#include "epf/neural/layer.hpp"

namespace epf::neural {

// Fully connected layer applied independently at every time step.
class DenseLayer final : public Layer {
public:
    DenseLayer(Matrix weight, Matrix bias, DenseActivation act);
    static DenseLayer random(std::size_t in, std::size_t units, DenseActivation act, numkernel::Rng& rng);

    LayerSpec spec() const override;
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::vector<ParamRef> params() override;
    std::unique_ptr<Layer> clone() const override;

private:
    Matrix w_, b_, dw_, db_;
    DenseActivation act_;
    Sequence in_, out_;
};

// Valid-padding temporal convolution: steps shrink by kernel - 1.
class Conv1dLayer final : public Layer {
public:
    Conv1dLayer(std::size_t channels, std::size_t filters, std::size_t kernel, DenseActivation act,
                numkernel::Rng& rng);

    LayerSpec spec() const override;
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::vector<ParamRef> params() override;
    std::unique_ptr<Layer> clone() const override;

private:
    std::size_t channels_, filters_, kernel_;
    Matrix w_, b_, dw_, db_;  // w: (kernel * channels) x filters
    DenseActivation act_;
    std::vector<Matrix> windows_;
    Sequence out_;
    std::size_t in_steps_ = 0;
};

// Non-overlapping max pooling over time; trailing steps that do not fill a
// window are dropped.
class MaxPoolLayer final : public Layer {
public:
    explicit MaxPoolLayer(std::size_t width) : width_(width) {}

    LayerSpec spec() const override { return LayerSpec::maxpool(width_); }
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPoolLayer>(*this); }

private:
    std::size_t width_;
    std::size_t in_steps_ = 0;
    std::vector<std::vector<std::size_t>> argmax_;  // per output step: flat (row-major) source step
};

// Concatenates all steps into one: (S, W) -> (1, S * W).
class FlattenLayer final : public Layer {
public:
    LayerSpec spec() const override { return LayerSpec::flatten(); }
    Shape output_shape(Shape in) const override { return {1, in.steps * in.width}; }
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<FlattenLayer>(*this); }

private:
    std::size_t steps_ = 0, width_ = 0;
};

// Copies a single step n times: (1, W) -> (n, W).
class RepeatLayer final : public Layer {
public:
    explicit RepeatLayer(std::size_t n) : n_(n) {}

    LayerSpec spec() const override { return LayerSpec::repeat_vector(n_); }
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<RepeatLayer>(*this); }

private:
    std::size_t n_;
};

}  // namespace epf::neural
