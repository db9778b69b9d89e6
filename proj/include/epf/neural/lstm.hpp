#pragma once

#include "epf/neural/layer.hpp"

namespace epf::neural {

/// Peephole LSTM weights with the four gates stacked column-wise in the order
/// forget, input, output, candidate:
///
///   f_t = sigmoid(x_t Wx_f + h_{t-1} Wh_f + c_{t-1} * p_f + b_f)
///   i_t = sigmoid(x_t Wx_i + h_{t-1} Wh_i + c_{t-1} * p_i + b_i)
///   o_t = sigmoid(x_t Wx_o + h_{t-1} Wh_o + c_{t-1} * p_o + b_o)
///   c_t = f_t * c_{t-1} + i_t * tanh(x_t Wx_c + h_{t-1} Wh_c + b_c)
///   h_t = o_t * tanh(c_t)          (or o_t * c_t with literal_output)
///
/// Peephole weights are diagonal: p_* are length-H vectors applied
/// elementwise.
struct LstmParams {
    std::size_t input_size = 0;
    std::size_t hidden = 0;
    Matrix wx;        // input_size x 4H
    Matrix wh;        // H x 4H
    Matrix peephole;  // 1 x 3H  (forget, input, output)
    Matrix bias;      // 1 x 4H

    static LstmParams zeros(std::size_t input_size, std::size_t hidden);
    // Uniform in [-1/sqrt(H), 1/sqrt(H)].
    static LstmParams random(std::size_t input_size, std::size_t hidden, numkernel::Rng& rng);
};

enum Gate : std::size_t { kForget = 0, kInput = 1, kOutput = 2, kCandidate = 3 };

struct LstmStates {
    Matrix hidden;  // T x H
    Matrix cell;    // T x H
};

// Single-sequence forward pass (window x D) from initial states h0, c0
// (1 x H; empty means zeros).
LstmStates lstm_forward(const LstmParams& params, const Matrix& sequence, const Matrix& h0 = {},
                        const Matrix& c0 = {}, bool literal_output = false);

// Parameter gradients of sum_t <upstream_t, h_t> for one sequence; upstream is
// T x H (dL/dh_t excluding the recurrent path).
LstmParams lstm_backward(const LstmParams& params, const Matrix& sequence, const Matrix& upstream,
                         bool literal_output = false);

class LstmLayer final : public Layer {
public:
    LstmLayer(LstmParams params, bool return_sequences, bool literal_output);

    LayerSpec spec() const override;
    Shape output_shape(Shape in) const override;
    Sequence forward(const Sequence& in) override;
    Sequence backward(const Sequence& grad_out) override;
    std::vector<ParamRef> params() override;
    std::unique_ptr<Layer> clone() const override;

    const LstmParams& weights() const { return params_; }
    // Gradients accumulated by backward() since construction or zero_gradients().
    const LstmParams& gradients() const { return grads_; }
    void zero_gradients();
    // Cell state of the last forward() at `step` (batch x H).
    const Matrix& cell(std::size_t step) const { return cache_.at(step).c; }

    // Initial states for the next forward() call (batch x H); cleared after use.
    void set_initial_state(Matrix h0, Matrix c0);

private:
    struct StepCache {
        Matrix x, h_prev, c_prev, f, i, o, g, c, tanh_c;
    };

    LstmParams params_;
    LstmParams grads_;
    bool return_sequences_;
    bool literal_output_;
    Matrix h0_, c0_;
    std::vector<StepCache> cache_;
};

}  // namespace epf::neural
