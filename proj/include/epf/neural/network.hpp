#pragma once

#include "epf/neural/layer.hpp"

#include <nlohmann/json.hpp>

#include <span>

namespace epf::neural {

struct NetworkSpec {
    std::vector<LayerSpec> layers;
    std::size_t window = 0;
    std::size_t features = 0;

    bool operator==(const NetworkSpec&) const = default;
};

// Propagates shapes through the stack; throws ShapeError if adjacent layers
// do not compose or the result is not a single output.
Shape validate(const NetworkSpec& spec);

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

// Time-major batch from `windows` (each window x features) at `rows`.
Sequence make_batch(std::span<const Matrix> windows, std::span<const std::size_t> rows);

class Network {
public:
    Network(NetworkSpec spec, numkernel::Rng& rng);
    Network(const Network& other);
    Network& operator=(const Network& other);
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    const NetworkSpec& spec() const { return spec_; }

    // Returns batch x 1 predictions.
    Matrix forward(const Sequence& batch);
    // Accumulates gradients for dL/d(prediction) of shape batch x 1.
    void backward(const Matrix& grad);
    std::vector<ParamRef> params();
    void zero_grad();
    std::size_t parameter_count();

    std::vector<double> predict(std::span<const Matrix> windows, std::size_t batch_size = 256);

    // Flat parameter vector in layer, then block, then row-major order.
    std::vector<double> flat_parameters();
    void set_flat_parameters(std::span<const double> values);

    // {"spec": ..., "parameters": [{"layer", "name", "rows", "cols", "values"}]}
    nlohmann::json to_json();
    static Network from_json(const nlohmann::json& j);

    Layer& layer(std::size_t i) { return *layers_.at(i); }

private:
    NetworkSpec spec_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace epf::neural
