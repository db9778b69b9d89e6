#pragma once

#include "epf/neural/layer.hpp"

namespace epf::neural {

// Peephole LSTM whose input-to-state and state-to-state maps are 1-D
// convolutions over `positions` (same padding, odd kernel). Each step's input
// row holds positions x channels values (position-major); states hold
// positions x filters. Peepholes are elementwise per position and filter.
//
// Layout kFeatureAxis reads a D-wide step as D positions of one channel;
// kChannels reads it as one position with D channels, which with kernel 1 is
// exactly the dense peephole LSTM.
struct ConvLstmParams {
    std::size_t positions = 0;
    std::size_t channels = 0;
    std::size_t filters = 0;
    std::size_t kernel = 1;
    Matrix wx;        // (kernel * channels) x 4F, gates f, i, o, c
    Matrix wh;        // (kernel * filters) x 4F
    Matrix peephole;  // positions x 3F
    Matrix bias;      // 1 x 4F

    static ConvLstmParams zeros(std::size_t positions, std::size_t channels, std::size_t filters,
                                std::size_t kernel);
    // Uniform in [-1/sqrt(F), 1/sqrt(F)].
    static ConvLstmParams random(std::size_t positions, std::size_t channels, std::size_t filters,
                                 std::size_t kernel, numkernel::Rng& rng);
};

class ConvLstmLayer final : public Layer {
public:
    ConvLstmLayer(ConvLstmParams params, ConvLstmLayout layout, bool return_sequences);

    LayerSpec spec() const override;
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::vector<ParamRef> params() override;
    std::unique_ptr<Layer> clone() const override;

    const ConvLstmParams& weights() const { return params_; }

private:
    struct StepCache {
        Matrix xcol, hcol, c_prev, f, i, o, g, c, tanh_c;  // states are (B * positions) x F
    };

    ConvLstmParams params_;
    ConvLstmParams grads_;
    ConvLstmLayout layout_;
    bool return_sequences_;
    std::vector<StepCache> cache_;
    Eigen::Index batch_ = 0;
};

}  // namespace epf::neural
