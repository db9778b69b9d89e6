#pragma once

#include "epf/numkernel/matrix.hpp"
#include "epf/numkernel/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace epf::neural {

using numkernel::Matrix;

// A batch flowing through the network: one (batch x width) matrix per time
// step. Flat activations are sequences of length one.
using Sequence = std::vector<Matrix>;

struct Shape {
    std::size_t steps = 0;
    std::size_t width = 0;
    bool operator==(const Shape&) const = default;
};

enum class LayerKind { kLstm, kDense, kConv1d, kMaxPool, kFlatten, kRepeat, kConvLstm };
enum class DenseActivation { kLinear, kRelu, kTanh };

// How a ConvLSTM reads each step's feature vector: as a 1-channel signal
// along the feature axis, or as one position with every feature a channel.
enum class ConvLstmLayout { kFeatureAxis, kChannels };

struct LayerSpec {
    LayerKind kind = LayerKind::kDense;
    std::size_t units = 0;   // lstm/dense units, conv/convlstm filters
    std::size_t kernel = 1;  // conv1d / convlstm kernel width
    std::size_t width = 2;   // maxpool window
    std::size_t repeat = 1;  // repeat count
    DenseActivation activation = DenseActivation::kLinear;
    bool return_sequences = false;
    // h_t = o_t * c_t instead of o_t * tanh(c_t).
    bool literal_output = false;
    ConvLstmLayout layout = ConvLstmLayout::kFeatureAxis;

    bool operator==(const LayerSpec&) const = default;

    static LayerSpec lstm(std::size_t units, bool return_sequences = false);
    static LayerSpec dense(std::size_t units, DenseActivation act = DenseActivation::kLinear);
    static LayerSpec conv1d(std::size_t filters, std::size_t kernel,
                            DenseActivation act = DenseActivation::kRelu);
    static LayerSpec maxpool(std::size_t width);
    static LayerSpec flatten();
    static LayerSpec repeat_vector(std::size_t n);
    static LayerSpec convlstm(std::size_t filters, std::size_t kernel,
                              ConvLstmLayout layout = ConvLstmLayout::kFeatureAxis);
};

nlohmann::json to_json(const LayerSpec& spec);
LayerSpec layer_from_json(const nlohmann::json& j);
std::string describe(const LayerSpec& spec);

// Named parameter block with its gradient accumulator.
struct ParamRef {
    std::string name;
    Matrix* value;
    Matrix* grad;
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerSpec spec() const = 0;
    virtual Shape output_shape(Shape in) const = 0;
    // Caches what backward() needs.
    virtual Sequence forward(const Sequence& in) = 0;
    // Accumulates parameter gradients; returns the gradient w.r.t. the input.
    virtual Sequence backward(const Sequence& grad_out) = 0;
    virtual std::vector<ParamRef> params() { return {}; }
    virtual std::unique_ptr<Layer> clone() const = 0;
};

// Builds a layer for input shape `in`, drawing initial weights from rng.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Shape in, numkernel::Rng& rng);

}  // namespace epf::neural
