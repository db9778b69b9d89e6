#include "epf/neural/lstm.hpp"

#include "epf/errors.hpp"
#include "epf/numkernel/activation.hpp"

#include <cmath>

namespace epf::neural {

namespace {

Matrix sigmoid(const Matrix& a) {
    return a.unaryExpr([](double v) { return numkernel::sigmoid(v); });
}

Matrix gate_cols(const Matrix& m, std::size_t gate, std::size_t hidden) {
    return m.middleCols(static_cast<Eigen::Index>(gate * hidden), static_cast<Eigen::Index>(hidden));
}

// c (B x H) * p (1 x H), broadcast over rows.
Matrix peep(const Matrix& c, const Matrix& p, std::size_t gate, std::size_t hidden) {
    const auto row = p.middleCols(static_cast<Eigen::Index>(gate * hidden), static_cast<Eigen::Index>(hidden));
    Matrix out = c;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        out.row(r).array() *= row.array();
    }
    return out;
}

Matrix column_sums(const Matrix& m) { return m.colwise().sum(); }

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_size, std::size_t hidden) {
    const auto d = static_cast<Eigen::Index>(input_size);
    const auto h = static_cast<Eigen::Index>(hidden);
    LstmParams p;
    p.input_size = input_size;
    p.hidden = hidden;
    p.wx = Matrix::Zero(d, 4 * h);
    p.wh = Matrix::Zero(h, 4 * h);
    p.peephole = Matrix::Zero(1, 3 * h);
    p.bias = Matrix::Zero(1, 4 * h);
    return p;
}

LstmParams LstmParams::random(std::size_t input_size, std::size_t hidden, numkernel::Rng& rng) {
    auto p = zeros(input_size, hidden);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Matrix* m : {&p.wx, &p.wh, &p.peephole, &p.bias}) {
        for (Eigen::Index k = 0; k < m->size(); ++k) {
            m->data()[k] = rng.uniform(-bound, bound);
        }
    }
    return p;
}

LstmLayer::LstmLayer(LstmParams params, bool return_sequences, bool literal_output)
    : params_(std::move(params)),
      grads_(LstmParams::zeros(params_.input_size, params_.hidden)),
      return_sequences_(return_sequences),
      literal_output_(literal_output) {}

LayerSpec LstmLayer::spec() const {
    auto s = LayerSpec::lstm(params_.hidden, return_sequences_);
    s.literal_output = literal_output_;
    return s;
}

Shape LstmLayer::output_shape(Shape in) const {
    if (in.width != params_.input_size) {
        throw ShapeError("lstm: input width " + std::to_string(in.width) + ", expected " +
                         std::to_string(params_.input_size));
    }
    return {return_sequences_ ? in.steps : 1, params_.hidden};
}

void LstmLayer::set_initial_state(Matrix h0, Matrix c0) {
    h0_ = std::move(h0);
    c0_ = std::move(c0);
}

Sequence LstmLayer::forward(const Sequence& in) {
    const auto hidden = params_.hidden;
    const auto h = static_cast<Eigen::Index>(hidden);
    if (in.empty()) {
        throw ShapeError("lstm: empty input sequence");
    }
    const auto batch = in.front().rows();
    if (in.front().cols() != static_cast<Eigen::Index>(params_.input_size)) {
        throw ShapeError("lstm: input width " + std::to_string(in.front().cols()) + ", expected " +
                         std::to_string(params_.input_size));
    }
    Matrix h_prev = h0_.size() ? h0_ : Matrix(Matrix::Zero(batch, h));
    Matrix c_prev = c0_.size() ? c0_ : Matrix(Matrix::Zero(batch, h));
    if (h_prev.rows() != batch || h_prev.cols() != h || c_prev.rows() != batch || c_prev.cols() != h) {
        throw ShapeError("lstm: initial state shape mismatch");
    }
    h0_.resize(0, 0);
    c0_.resize(0, 0);

    cache_.clear();
    cache_.reserve(in.size());
    Sequence out;
    for (const auto& x : in) {
        Matrix a = x * params_.wx + h_prev * params_.wh;
        a.rowwise() += params_.bias.row(0);
        StepCache s;
        s.f = sigmoid(gate_cols(a, kForget, hidden) + peep(c_prev, params_.peephole, kForget, hidden));
        s.i = sigmoid(gate_cols(a, kInput, hidden) + peep(c_prev, params_.peephole, kInput, hidden));
        s.o = sigmoid(gate_cols(a, kOutput, hidden) + peep(c_prev, params_.peephole, kOutput, hidden));
        s.g = gate_cols(a, kCandidate, hidden).array().tanh().matrix();
        s.c = (s.f.array() * c_prev.array() + s.i.array() * s.g.array()).matrix();
        s.tanh_c = s.c.array().tanh().matrix();
        Matrix h_t = literal_output_ ? Matrix((s.o.array() * s.c.array()).matrix())
                                     : Matrix((s.o.array() * s.tanh_c.array()).matrix());
        s.x = x;
        s.h_prev = std::move(h_prev);
        s.c_prev = std::move(c_prev);
        h_prev = h_t;
        c_prev = s.c;
        cache_.push_back(std::move(s));
        if (return_sequences_) {
            out.push_back(std::move(h_t));
        }
    }
    if (!return_sequences_) {
        out.push_back(h_prev);
    }
    return out;
}

Sequence LstmLayer::backward(const Sequence& grad_out) {
    const auto hidden = params_.hidden;
    const auto h = static_cast<Eigen::Index>(hidden);
    const std::size_t steps = cache_.size();
    const auto batch = cache_.front().x.rows();
    Matrix dh_next = Matrix::Zero(batch, h);
    Matrix dc_next = Matrix::Zero(batch, h);
    Sequence dx(steps);
    const auto pf = params_.peephole.middleCols(0, h);
    const auto pi = params_.peephole.middleCols(h, h);
    const auto po = params_.peephole.middleCols(2 * h, h);

    for (std::size_t k = steps; k-- > 0;) {
        const auto& s = cache_[k];
        Matrix dh = dh_next;
        if (return_sequences_) {
            dh += grad_out[k];
        } else if (k + 1 == steps) {
            dh += grad_out.front();
        }
        Matrix d_o;
        Matrix dc = dc_next;
        if (literal_output_) {
            d_o = (dh.array() * s.c.array()).matrix();
            dc.array() += dh.array() * s.o.array();
        } else {
            d_o = (dh.array() * s.tanh_c.array()).matrix();
            dc.array() += dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square());
        }
        const Matrix daf = (dc.array() * s.c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
        const Matrix dai = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
        const Matrix dao = (d_o.array() * s.o.array() * (1.0 - s.o.array())).matrix();
        const Matrix dac = (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();

        Matrix da(batch, 4 * h);
        da << daf, dai, dao, dac;

#ifdef EPF_TAMPER_LSTM_BACKWARD
        grads_.wx.noalias() -= s.x.transpose() * da;
#else
        grads_.wx.noalias() += s.x.transpose() * da;
#endif
        grads_.wh.noalias() += s.h_prev.transpose() * da;
        grads_.bias += column_sums(da);
        grads_.peephole.middleCols(0, h) += column_sums((daf.array() * s.c_prev.array()).matrix());
        grads_.peephole.middleCols(h, h) += column_sums((dai.array() * s.c_prev.array()).matrix());
        grads_.peephole.middleCols(2 * h, h) += column_sums((dao.array() * s.c_prev.array()).matrix());

        dx[k] = da * params_.wx.transpose();
        dh_next = da * params_.wh.transpose();
        dc_next = (dc.array() * s.f.array()).matrix();
        for (Eigen::Index r = 0; r < batch; ++r) {
            dc_next.row(r).array() += daf.row(r).array() * pf.array() + dai.row(r).array() * pi.array() +
                                      dao.row(r).array() * po.array();
        }
    }
    return dx;
}

void LstmLayer::zero_gradients() { grads_ = LstmParams::zeros(params_.input_size, params_.hidden); }

std::vector<ParamRef> LstmLayer::params() {
    return {{"wx", &params_.wx, &grads_.wx},
            {"wh", &params_.wh, &grads_.wh},
            {"peephole", &params_.peephole, &grads_.peephole},
            {"bias", &params_.bias, &grads_.bias}};
}

std::unique_ptr<Layer> LstmLayer::clone() const { return std::make_unique<LstmLayer>(*this); }

LstmStates lstm_forward(const LstmParams& params, const Matrix& sequence, const Matrix& h0,
                        const Matrix& c0, bool literal_output) {
    if (sequence.cols() != static_cast<Eigen::Index>(params.input_size)) {
        throw ShapeError("lstm_forward: sequence has " + std::to_string(sequence.cols()) +
                         " features, expected " + std::to_string(params.input_size));
    }
    const auto h = static_cast<Eigen::Index>(params.hidden);
    if ((h0.size() && (h0.rows() != 1 || h0.cols() != h)) || (c0.size() && (c0.rows() != 1 || c0.cols() != h))) {
        throw ShapeError("lstm_forward: initial states must be 1 x " + std::to_string(params.hidden));
    }
    LstmLayer layer(params, true, literal_output);
    if (h0.size() || c0.size()) {
        layer.set_initial_state(h0.size() ? h0 : Matrix(Matrix::Zero(1, h)),
                                c0.size() ? c0 : Matrix(Matrix::Zero(1, h)));
    }
    Sequence in;
    for (Eigen::Index t = 0; t < sequence.rows(); ++t) {
        in.push_back(sequence.row(t));
    }
    const auto hs = layer.forward(in);
    LstmStates states;
    states.hidden.resize(sequence.rows(), h);
    states.cell.resize(sequence.rows(), h);
    for (Eigen::Index t = 0; t < sequence.rows(); ++t) {
        states.hidden.row(t) = hs[static_cast<std::size_t>(t)].row(0);
        states.cell.row(t) = layer.cell(static_cast<std::size_t>(t)).row(0);
    }
    return states;
}

LstmParams lstm_backward(const LstmParams& params, const Matrix& sequence, const Matrix& upstream,
                         bool literal_output) {
    if (upstream.rows() != sequence.rows() || upstream.cols() != static_cast<Eigen::Index>(params.hidden)) {
        throw ShapeError("lstm_backward: upstream must be " + std::to_string(sequence.rows()) + " x " +
                         std::to_string(params.hidden));
    }
    LstmLayer layer(params, true, literal_output);
    Sequence in;
    Sequence grad;
    for (Eigen::Index t = 0; t < sequence.rows(); ++t) {
        in.push_back(sequence.row(t));
        grad.push_back(upstream.row(t));
    }
    layer.forward(in);
    layer.backward(grad);
    return layer.gradients();
}

}  // namespace epf::neural
