#include "cases.hpp"
#include "naive.hpp"

#include "epf/neural/lstm.hpp"
#include "epf/neural/network.hpp"

#include <cmath>
#include <string>

namespace epf::oracles {

namespace {

using naive::Lcg;
using numkernel::Matrix;

// Scalar-loop peephole LSTM; returns sum_t <upstream_t, h_t>.
double naive_lstm_loss(const neural::LstmParams& p, const Matrix& seq, const Matrix& upstream, bool literal) {
    const std::size_t hn = p.hidden, d = p.input_size;
    std::vector<double> h(hn, 0.0), c(hn, 0.0);
    double loss = 0.0;
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
        std::vector<double> h_new(hn), c_new(hn);
        for (std::size_t k = 0; k < hn; ++k) {
            double pre[4];
            for (std::size_t g = 0; g < 4; ++g) {
                const auto col = static_cast<Eigen::Index>(g * hn + k);
                double s = p.bias(0, col);
                for (std::size_t i = 0; i < d; ++i) s += seq(t, static_cast<Eigen::Index>(i)) * p.wx(static_cast<Eigen::Index>(i), col);
                for (std::size_t j = 0; j < hn; ++j) s += h[j] * p.wh(static_cast<Eigen::Index>(j), col);
                if (g < 3) s += c[k] * p.peephole(0, col);
                pre[g] = s;
            }
            const double f = naive::sigmoid(pre[0]), in = naive::sigmoid(pre[1]), o = naive::sigmoid(pre[2]);
            c_new[k] = f * c[k] + in * std::tanh(pre[3]);
            h_new[k] = literal ? o * c_new[k] : o * std::tanh(c_new[k]);
            loss += upstream(t, static_cast<Eigen::Index>(k)) * h_new[k];
        }
        h = h_new;
        c = c_new;
    }
    return loss;
}

Matrix random_matrix(Lcg& g, Eigen::Index r, Eigen::Index c, double scale) {
    Matrix m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = scale * g.uniform(-1.0, 1.0);
    return m;
}

double relative_error(double a, double n) { return std::abs(a - n) / std::max(std::abs(a) + std::abs(n), 1e-5); }

Outcome lstm_gradient(std::uint64_t base_seed, bool literal) {
    Outcome worst{0.0, {}};
    for (std::uint64_t s = 0; s < 20; ++s) {
        Lcg g(base_seed + s);
        neural::LstmParams p;
        p.input_size = 2;
        p.hidden = 3;
        p.wx = random_matrix(g, 2, 12, 0.8);
        p.wh = random_matrix(g, 3, 12, 0.8);
        p.peephole = random_matrix(g, 1, 9, 0.8);
        p.bias = random_matrix(g, 1, 12, 0.5);
        const Matrix seq = random_matrix(g, 5, 2, 1.0);
        const Matrix up = random_matrix(g, 5, 3, 1.0);
        const auto grads = neural::lstm_backward(p, seq, up, literal);

        const std::pair<Matrix neural::LstmParams::*, const char*> blocks[] = {
            {&neural::LstmParams::wx, "wx"},
            {&neural::LstmParams::wh, "wh"},
            {&neural::LstmParams::peephole, "peephole"},
            {&neural::LstmParams::bias, "bias"},
        };
        const double h = 1e-6;
        for (const auto& [member, label] : blocks) {
            for (Eigen::Index e = 0; e < (p.*member).size(); ++e) {
                auto plus = p, minus = p;
                (plus.*member).data()[e] += h;
                (minus.*member).data()[e] -= h;
                const double numeric =
                    (naive_lstm_loss(plus, seq, up, literal) - naive_lstm_loss(minus, seq, up, literal)) / (2 * h);
                const double rel = relative_error((grads.*member).data()[e], numeric);
                if (!(rel <= worst.deviation)) {
                    worst = {rel, "seed " + std::to_string(base_seed + s) + " " + label + "[" + std::to_string(e) + "]"};
                }
            }
        }
    }
    return worst;
}

// Stacked network, MSE loss; central differences through the forward pass only.
Outcome network_gradient(std::uint64_t seed) {
    Lcg g(seed);
    neural::NetworkSpec spec{{neural::LayerSpec::lstm(3), neural::LayerSpec::repeat_vector(1),
                              neural::LayerSpec::lstm(3), neural::LayerSpec::dense(4, neural::DenseActivation::kTanh),
                              neural::LayerSpec::dense(1)},
                             4,
                             2};
    numkernel::Rng init(seed);
    neural::Network net(spec, init);
    std::vector<Matrix> windows;
    std::vector<double> targets;
    for (int b = 0; b < 3; ++b) {
        windows.push_back(random_matrix(g, 4, 2, 1.0));
        targets.push_back(g.uniform(-1.0, 1.0));
    }
    std::vector<std::size_t> rows{0, 1, 2};
    const auto batch = neural::make_batch(windows, rows);
    auto mse = [&](neural::Network& n) {
        const Matrix y = n.forward(batch);
        double s = 0.0;
        for (Eigen::Index r = 0; r < y.rows(); ++r) s += (y(r, 0) - targets[r]) * (y(r, 0) - targets[r]);
        return s / static_cast<double>(y.rows());
    };
    net.zero_grad();
    const Matrix y = net.forward(batch);
    Matrix grad(y.rows(), 1);
    for (Eigen::Index r = 0; r < y.rows(); ++r) grad(r, 0) = 2.0 * (y(r, 0) - targets[r]) / static_cast<double>(y.rows());
    net.backward(grad);
    std::vector<double> analytic;
    for (auto& p : net.params()) analytic.insert(analytic.end(), p.grad->data(), p.grad->data() + p.grad->size());

    const auto theta = net.flat_parameters();
    Outcome worst{0.0, {}};
    const double h = 1e-6;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        auto up = theta, down = theta;
        up[k] += h;
        down[k] -= h;
        net.set_flat_parameters(up);
        const double fu = mse(net);
        net.set_flat_parameters(down);
        const double fd = mse(net);
        const double rel = relative_error(analytic[k], (fu - fd) / (2 * h));
        if (!(rel <= worst.deviation)) worst = {rel, "parameter " + std::to_string(k)};
    }
    return worst;
}

}  // namespace

void add_neural_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"neural.lstm_gradient", "neural", 1000, "central differences of a scalar-loop LSTM, 20 seeds",
                     1e-4, [](std::uint64_t s) { return lstm_gradient(s, false); }});
    cases.push_back({"neural.lstm_gradient_literal_output", "neural", 2000,
                     "central differences of a scalar-loop LSTM with h = o * c, 20 seeds", 1e-4,
                     [](std::uint64_t s) { return lstm_gradient(s, true); }});
    cases.push_back({"neural.network_gradient", "neural", 3000,
                     "central differences of the batch MSE through LSTM, repeat, LSTM and dense layers", 1e-4,
                     network_gradient});
}

}  // namespace epf::oracles
