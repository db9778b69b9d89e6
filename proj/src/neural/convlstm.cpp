#include "epf/neural/convlstm.hpp"

#include "epf/errors.hpp"
#include "epf/numkernel/activation.hpp"

#include <cmath>

namespace epf::neural {

namespace {

// (B * S) x C -> (B * S) x (K * C), zero padded so output positions equal S.
Matrix im2col(const Matrix& in, Eigen::Index batch, Eigen::Index positions, Eigen::Index kernel) {
    const Eigen::Index c = in.cols();
    const Eigen::Index pad = kernel / 2;
    Matrix col = Matrix::Zero(batch * positions, kernel * c);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index s = 0; s < positions; ++s) {
            for (Eigen::Index k = 0; k < kernel; ++k) {
                const Eigen::Index src = s + k - pad;
                if (src >= 0 && src < positions) {
                    col.block(b * positions + s, k * c, 1, c) = in.row(b * positions + src);
                }
            }
        }
    }
    return col;
}

// Adjoint of im2col.
Matrix col2im(const Matrix& col, Eigen::Index batch, Eigen::Index positions, Eigen::Index kernel) {
    const Eigen::Index c = col.cols() / kernel;
    const Eigen::Index pad = kernel / 2;
    Matrix out = Matrix::Zero(batch * positions, c);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index s = 0; s < positions; ++s) {
            for (Eigen::Index k = 0; k < kernel; ++k) {
                const Eigen::Index src = s + k - pad;
                if (src >= 0 && src < positions) {
                    out.row(b * positions + src) += col.block(b * positions + s, k * c, 1, c);
                }
            }
        }
    }
    return out;
}

// Row-major reinterpretation between B x (S * C) and (B * S) x C.
Matrix reshape(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Matrix>(m.data(), rows, cols);
}

// Elementwise product of a (B * S) x F state with the S x F peephole block.
Matrix peep(const Matrix& c, const Matrix& p, Eigen::Index gate, Eigen::Index f) {
    const Eigen::Index positions = p.rows();
    Matrix out = c;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        out.row(r).array() *= p.block(r % positions, gate * f, 1, f).array();
    }
    return out;
}

// Sums rows of a (B * S) x F matrix into S x F.
Matrix sum_over_batch(const Matrix& m, Eigen::Index positions) {
    Matrix out = Matrix::Zero(positions, m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out.row(r % positions) += m.row(r);
    }
    return out;
}

Matrix sigmoid(const Matrix& a) {
    return a.unaryExpr([](double v) { return numkernel::sigmoid(v); });
}

}  // namespace

ConvLstmParams ConvLstmParams::zeros(std::size_t positions, std::size_t channels, std::size_t filters,
                                     std::size_t kernel) {
    if (kernel % 2 == 0) {
        throw ConfigError("convlstm: kernel must be odd, got " + std::to_string(kernel));
    }
    ConvLstmParams p;
    p.positions = positions;
    p.channels = channels;
    p.filters = filters;
    p.kernel = kernel;
    const auto f = static_cast<Eigen::Index>(filters);
    const auto k = static_cast<Eigen::Index>(kernel);
    p.wx = Matrix::Zero(k * static_cast<Eigen::Index>(channels), 4 * f);
    p.wh = Matrix::Zero(k * f, 4 * f);
    p.peephole = Matrix::Zero(static_cast<Eigen::Index>(positions), 3 * f);
    p.bias = Matrix::Zero(1, 4 * f);
    return p;
}

ConvLstmParams ConvLstmParams::random(std::size_t positions, std::size_t channels, std::size_t filters,
                                      std::size_t kernel, numkernel::Rng& rng) {
    auto p = zeros(positions, channels, filters, kernel);
    const double bound = 1.0 / std::sqrt(static_cast<double>(filters));
    for (Matrix* m : {&p.wx, &p.wh, &p.peephole, &p.bias}) {
        for (Eigen::Index e = 0; e < m->size(); ++e) {
            m->data()[e] = rng.uniform(-bound, bound);
        }
    }
    return p;
}

ConvLstmLayer::ConvLstmLayer(ConvLstmParams params, ConvLstmLayout layout, bool return_sequences)
    : params_(std::move(params)),
      grads_(ConvLstmParams::zeros(params_.positions, params_.channels, params_.filters, params_.kernel)),
      layout_(layout),
      return_sequences_(return_sequences) {}

LayerSpec ConvLstmLayer::spec() const {
    auto s = LayerSpec::convlstm(params_.filters, params_.kernel, layout_);
    s.return_sequences = return_sequences_;
    return s;
}

Shape ConvLstmLayer::output_shape(Shape in) const {
    if (in.width != params_.positions * params_.channels) {
        throw ShapeError("convlstm: input width " + std::to_string(in.width) + ", expected " +
                         std::to_string(params_.positions * params_.channels));
    }
    return {return_sequences_ ? in.steps : 1, params_.positions * params_.filters};
}

Sequence ConvLstmLayer::forward(const Sequence& in) {
    if (in.empty()) {
        throw ShapeError("convlstm: empty input sequence");
    }
    output_shape({in.size(), static_cast<std::size_t>(in.front().cols())});
    const auto s_n = static_cast<Eigen::Index>(params_.positions);
    const auto c_n = static_cast<Eigen::Index>(params_.channels);
    const auto f = static_cast<Eigen::Index>(params_.filters);
    const auto k = static_cast<Eigen::Index>(params_.kernel);
    batch_ = in.front().rows();
    const Eigen::Index rows = batch_ * s_n;

    Matrix h_prev = Matrix::Zero(rows, f);
    Matrix c_prev = Matrix::Zero(rows, f);
    cache_.clear();
    cache_.reserve(in.size());
    Sequence out;
    for (const auto& x : in) {
        StepCache st;
        st.xcol = im2col(reshape(x, rows, c_n), batch_, s_n, k);
        st.hcol = im2col(h_prev, batch_, s_n, k);
        Matrix a = st.xcol * params_.wx + st.hcol * params_.wh;
        a.rowwise() += params_.bias.row(0);
        st.f = sigmoid(a.middleCols(0, f) + peep(c_prev, params_.peephole, 0, f));
        st.i = sigmoid(a.middleCols(f, f) + peep(c_prev, params_.peephole, 1, f));
        st.o = sigmoid(a.middleCols(2 * f, f) + peep(c_prev, params_.peephole, 2, f));
        st.g = a.middleCols(3 * f, f).array().tanh().matrix();
        st.c = (st.f.array() * c_prev.array() + st.i.array() * st.g.array()).matrix();
        st.tanh_c = st.c.array().tanh().matrix();
        h_prev = (st.o.array() * st.tanh_c.array()).matrix();
        st.c_prev = std::move(c_prev);
        c_prev = st.c;
        cache_.push_back(std::move(st));
        if (return_sequences_) {
            out.push_back(reshape(h_prev, batch_, s_n * f));
        }
    }
    if (!return_sequences_) {
        out.push_back(reshape(h_prev, batch_, s_n * f));
    }
    return out;
}

Sequence ConvLstmLayer::backward(const Sequence& grad_out) {
    const auto s_n = static_cast<Eigen::Index>(params_.positions);
    const auto c_n = static_cast<Eigen::Index>(params_.channels);
    const auto f = static_cast<Eigen::Index>(params_.filters);
    const auto k = static_cast<Eigen::Index>(params_.kernel);
    const Eigen::Index rows = batch_ * s_n;
    const std::size_t steps = cache_.size();

    Matrix dh_next = Matrix::Zero(rows, f);
    Matrix dc_next = Matrix::Zero(rows, f);
    Sequence dx(steps);
    for (std::size_t t = steps; t-- > 0;) {
        const auto& st = cache_[t];
        Matrix dh = dh_next;
        if (return_sequences_) {
            dh += reshape(grad_out[t], rows, f);
        } else if (t + 1 == steps) {
            dh += reshape(grad_out.front(), rows, f);
        }
        const Matrix d_o = (dh.array() * st.tanh_c.array()).matrix();
        Matrix dc = dc_next;
        dc.array() += dh.array() * st.o.array() * (1.0 - st.tanh_c.array().square());

        Matrix da(rows, 4 * f);
        da.middleCols(0, f) = (dc.array() * st.c_prev.array() * st.f.array() * (1.0 - st.f.array())).matrix();
        da.middleCols(f, f) = (dc.array() * st.g.array() * st.i.array() * (1.0 - st.i.array())).matrix();
        da.middleCols(2 * f, f) = (d_o.array() * st.o.array() * (1.0 - st.o.array())).matrix();
        da.middleCols(3 * f, f) = (dc.array() * st.i.array() * (1.0 - st.g.array().square())).matrix();

        grads_.wx.noalias() += st.xcol.transpose() * da;
        grads_.wh.noalias() += st.hcol.transpose() * da;
        grads_.bias += da.colwise().sum();
        for (Eigen::Index g = 0; g < 3; ++g) {
            const Matrix dag = da.middleCols(g * f, f);
            grads_.peephole.middleCols(g * f, f) +=
                sum_over_batch((dag.array() * st.c_prev.array()).matrix(), s_n);
        }

        const Matrix dx_pos = col2im(da * params_.wx.transpose(), batch_, s_n, k);
        dx[t] = reshape(dx_pos, batch_, s_n * c_n);
        dh_next = col2im(da * params_.wh.transpose(), batch_, s_n, k);
        dc_next = (dc.array() * st.f.array()).matrix();
        for (Eigen::Index g = 0; g < 3; ++g) {
            dc_next += peep(da.middleCols(g * f, f), params_.peephole, g, f);
        }
    }
    return dx;
}

std::vector<ParamRef> ConvLstmLayer::params() {
    return {{"wx", &params_.wx, &grads_.wx},
            {"wh", &params_.wh, &grads_.wh},
            {"peephole", &params_.peephole, &grads_.peephole},
            {"bias", &params_.bias, &grads_.bias}};
}

std::unique_ptr<Layer> ConvLstmLayer::clone() const { return std::make_unique<ConvLstmLayer>(*this); }

}  // namespace epf::neural
