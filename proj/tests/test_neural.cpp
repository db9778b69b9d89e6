#include "epf/errors.hpp"
#include "epf/neural/adam.hpp"
#include "epf/neural/convlstm.hpp"
#include "epf/neural/gradcheck.hpp"
#include "epf/neural/layers.hpp"
#include "epf/neural/lstm.hpp"
#include "epf/neural/network.hpp"
#include "epf/neural/train.hpp"

#include <doctest.h>

#include <cmath>

using namespace epf;
using namespace epf::neural;
using numkernel::Matrix;
using numkernel::Rng;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        m.data()[k] = scale * rng.normal();
    }
    return m;
}

struct Sample {
    std::vector<Matrix> windows;
    std::vector<double> targets;
};

Sample random_sample(std::size_t n, std::size_t window, std::size_t features, Rng& rng) {
    Sample s;
    for (std::size_t k = 0; k < n; ++k) {
        s.windows.push_back(random_matrix(static_cast<Eigen::Index>(window), static_cast<Eigen::Index>(features), rng));
        s.targets.push_back(rng.normal());
    }
    return s;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

splits::WindowedDataset dataset(const Sample& s) {
    splits::WindowedDataset d;
    d.inputs = s.windows;
    d.targets = s.targets;
    d.window = s.windows.empty() ? 0 : static_cast<std::size_t>(s.windows.front().rows());
    return d;
}

}  // namespace

TEST_CASE("lstm with zero parameters stays at the zero state") {
    Rng rng(3);
    const auto params = LstmParams::zeros(2, 3);
    const auto states = lstm_forward(params, random_matrix(6, 2, rng));
    CHECK(states.hidden.isZero(0.0));
    CHECK(states.cell.isZero(0.0));
}

TEST_CASE("lstm single step matches hand evaluation for 1x1 sizes") {
    auto p = LstmParams::zeros(1, 1);
    p.wx << 0.3, -0.4, 0.7, 1.1;
    p.bias << 0.05, 0.2, -0.1, 0.3;
    p.wh << 9.0, 9.0, 9.0, 9.0;       // irrelevant with h0 = 0
    p.peephole << 5.0, 5.0, 5.0;     // irrelevant with c0 = 0
    Matrix x(1, 1);
    x << 0.8;
    const auto s = lstm_forward(p, x);
    const double i1 = logistic(-0.4 * 0.8 + 0.2);
    const double o1 = logistic(0.7 * 0.8 - 0.1);
    const double c1 = i1 * std::tanh(1.1 * 0.8 + 0.3);
    CHECK(s.cell(0, 0) == doctest::Approx(c1).epsilon(1e-14));
    CHECK(s.hidden(0, 0) == doctest::Approx(o1 * std::tanh(c1)).epsilon(1e-14));

    const auto literal = lstm_forward(p, x, {}, {}, true);
    CHECK(literal.hidden(0, 0) == doctest::Approx(o1 * c1).epsilon(1e-14));
}

TEST_CASE("lstm second step uses peepholes on the previous cell") {
    auto p = LstmParams::zeros(1, 1);
    Rng rng(11);
    p = LstmParams::random(1, 1, rng);
    Matrix x(2, 1);
    x << 0.4, -0.9;
    const auto s = lstm_forward(p, x);
    const double c0 = s.cell(0, 0), h0 = s.hidden(0, 0);
    auto pre = [&](int g) { return p.wx(0, g) * -0.9 + p.wh(0, g) * h0 + p.bias(0, g); };
    const double f = logistic(pre(0) + p.peephole(0, 0) * c0);
    const double i = logistic(pre(1) + p.peephole(0, 1) * c0);
    const double o = logistic(pre(2) + p.peephole(0, 2) * c0);
    const double c = f * c0 + i * std::tanh(pre(3));
    CHECK(s.cell(1, 0) == doctest::Approx(c).epsilon(1e-13));
    CHECK(s.hidden(1, 0) == doctest::Approx(o * std::tanh(c)).epsilon(1e-13));
}

TEST_CASE("lstm forward is deterministic and honours initial states") {
    Rng rng(5);
    const auto p = LstmParams::random(2, 4, rng);
    const Matrix x = random_matrix(5, 2, rng);
    CHECK(lstm_forward(p, x).hidden == lstm_forward(p, x).hidden);
    const Matrix h0 = random_matrix(1, 4, rng), c0 = random_matrix(1, 4, rng);
    CHECK(lstm_forward(p, x, h0, c0).hidden != lstm_forward(p, x).hidden);
    CHECK_THROWS_AS(lstm_forward(p, random_matrix(5, 3, rng)), ShapeError);
    CHECK_THROWS_AS(lstm_forward(p, x, random_matrix(1, 3, rng)), ShapeError);
}

TEST_CASE("lstm hidden outputs stay bounded on large random inputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto p = LstmParams::random(3, 5, rng);
        const auto s = lstm_forward(p, random_matrix(30, 3, rng, 50.0));
        CHECK(s.hidden.cwiseAbs().maxCoeff() < 1.0);
        // |c_t| <= |c_{t-1}| + 1 because f, i lie in (0,1) and the candidate in
        // (-1,1); saturation can round the bound to equality.
        for (Eigen::Index t = 1; t < s.cell.rows(); ++t) {
            CHECK(((s.cell.row(t).cwiseAbs() - s.cell.row(t - 1).cwiseAbs()).array() <= 1.0).all());
        }
    }
}

TEST_CASE("lstm_backward with zero upstream gives zero gradients") {
    Rng rng(9);
    const auto p = LstmParams::random(2, 3, rng);
    const auto g = lstm_backward(p, random_matrix(4, 2, rng), Matrix::Zero(4, 3));
    CHECK(g.wx.isZero(0.0));
    CHECK(g.wh.isZero(0.0));
    CHECK(g.peephole.isZero(0.0));
    CHECK(g.bias.isZero(0.0));
}

TEST_CASE("lstm_backward matches central differences of a linear readout") {
    Rng rng(21);
    auto p = LstmParams::random(2, 3, rng);
    const Matrix x = random_matrix(4, 2, rng);
    const Matrix up = random_matrix(4, 3, rng);
    const auto g = lstm_backward(p, x, up);
    auto loss = [&](const LstmParams& q) { return (lstm_forward(q, x).hidden.array() * up.array()).sum(); };
    const double h = 1e-6;
    for (int e = 0; e < p.peephole.size(); ++e) {
        auto q = p;
        q.peephole.data()[e] += h;
        const double plus = loss(q);
        q.peephole.data()[e] -= 2 * h;
        const double num = (plus - loss(q)) / (2 * h);
        CHECK(g.peephole.data()[e] == doctest::Approx(num).epsilon(1e-6));
    }
}

TEST_CASE("gradient check passes for every layer type over 20 seeds") {
    struct Case {
        const char* name;
        NetworkSpec spec;
    };
    const std::vector<Case> cases{
        {"lstm", {{LayerSpec::lstm(3), LayerSpec::dense(1)}, 4, 2}},
        {"lstm-literal", {[] {
                              auto l = LayerSpec::lstm(3);
                              l.literal_output = true;
                              return std::vector{l, LayerSpec::dense(1)};
                          }(),
                          4, 2}},
        {"lstm-seq", {{LayerSpec::lstm(3, true), LayerSpec::lstm(2), LayerSpec::dense(1)}, 3, 2}},
        {"dense", {{LayerSpec::dense(4, DenseActivation::kTanh), LayerSpec::dense(1)}, 1, 3}},
        {"conv-pool", {{LayerSpec::conv1d(3, 2, DenseActivation::kTanh), LayerSpec::maxpool(2), LayerSpec::flatten(),
                        LayerSpec::dense(1)},
                       5, 2}},
        {"convlstm", {{LayerSpec::convlstm(2, 3), LayerSpec::dense(1)}, 3, 4}},
        {"encoder-decoder", {{LayerSpec::lstm(3), LayerSpec::repeat_vector(1), LayerSpec::lstm(3),
                              LayerSpec::dense(2, DenseActivation::kTanh), LayerSpec::dense(1)},
                             4, 2}},
    };
    for (const auto& c : cases) {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            Network net(c.spec, rng);
            const auto s = random_sample(3, c.spec.window, c.spec.features, rng);
            worst = std::max(worst, gradient_check(net, s.windows, s.targets).max_relative_error);
        }
        INFO(c.name);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("dense-only gradient check is tight") {
    Rng rng(1);
    Network net({{LayerSpec::dense(5, DenseActivation::kTanh), LayerSpec::dense(1)}, 1, 3}, rng);
    const auto s = random_sample(4, 1, 3, rng);
    CHECK(gradient_check(net, s.windows, s.targets).max_relative_error < 1e-6);
}

TEST_CASE("maxpool takes windowed maxima and routes gradients to the argmax") {
    MaxPoolLayer pool(2);
    Sequence in;
    for (double v : {1.0, 3.0, 2.0, 5.0}) {
        in.push_back(Matrix::Constant(1, 1, v));
    }
    const auto out = pool.forward(in);
    REQUIRE(out.size() == 2);
    CHECK(out[0](0, 0) == 3.0);
    CHECK(out[1](0, 0) == 5.0);
    const auto dx = pool.backward({Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)});
    CHECK(dx[0](0, 0) == 0.0);
    CHECK(dx[1](0, 0) == 1.0);
    CHECK(dx[2](0, 0) == 0.0);
    CHECK(dx[3](0, 0) == 2.0);
}

TEST_CASE("flatten concatenates steps") {
    FlattenLayer flat;
    CHECK(flat.output_shape({3, 2}) == Shape{1, 6});
    Sequence in{Matrix::Constant(1, 2, 1.0), Matrix::Constant(1, 2, 2.0), Matrix::Constant(1, 2, 3.0)};
    const auto out = flat.forward(in);
    REQUIRE(out.size() == 1);
    CHECK(out[0].cols() == 6);
    CHECK(out[0](0, 5) == 3.0);
}

TEST_CASE("conv1d shapes and width-1 kernel") {
    Rng rng(2);
    Conv1dLayer conv(2, 1, 1, DenseActivation::kLinear, rng);
    auto params = conv.params();
    *params[0].value << 2.0, -1.0;
    *params[1].value << 0.5;
    Sequence in{numkernel::from_rows({{1.0, 4.0}}), numkernel::from_rows({{3.0, 1.0}})};
    const auto out = conv.forward(in);
    REQUIRE(out.size() == 2);
    CHECK(out[0](0, 0) == doctest::Approx(2.0 - 4.0 + 0.5));
    CHECK(out[1](0, 0) == doctest::Approx(6.0 - 1.0 + 0.5));

    Conv1dLayer wide(2, 3, 4, DenseActivation::kRelu, rng);
    CHECK(wide.output_shape({6, 2}) == Shape{3, 3});
    CHECK_THROWS_AS(wide.output_shape({3, 2}), ShapeError);
}

TEST_CASE("convlstm with zero parameters gives zero states") {
    ConvLstmLayer layer(ConvLstmParams::zeros(5, 1, 3, 3), ConvLstmLayout::kFeatureAxis, true);
    Rng rng(4);
    Sequence in;
    for (int t = 0; t < 4; ++t) {
        in.push_back(random_matrix(2, 5, rng));
    }
    for (const auto& h : layer.forward(in)) {
        CHECK(h.isZero(0.0));
    }
}

TEST_CASE("convlstm with a width-1 kernel over channels equals the dense lstm") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const auto lp = LstmParams::random(3, 4, rng);
        auto cp = ConvLstmParams::zeros(1, 3, 4, 1);
        cp.wx = lp.wx;
        cp.wh = lp.wh;
        cp.peephole = lp.peephole;
        cp.bias = lp.bias;
        ConvLstmLayer conv(cp, ConvLstmLayout::kChannels, true);
        const Matrix x = random_matrix(6, 3, rng);
        Sequence in;
        for (Eigen::Index t = 0; t < x.rows(); ++t) {
            in.push_back(x.row(t));
        }
        const auto out = conv.forward(in);
        const auto ref = lstm_forward(lp, x);
        for (Eigen::Index t = 0; t < x.rows(); ++t) {
            CHECK((out[static_cast<std::size_t>(t)] - ref.hidden.row(t)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("convlstm rejects even kernels and mismatched widths") {
    CHECK_THROWS_AS(ConvLstmParams::zeros(4, 1, 2, 2), ConfigError);
    ConvLstmLayer layer(ConvLstmParams::zeros(4, 1, 2, 3), ConvLstmLayout::kFeatureAxis, false);
    CHECK_THROWS_AS(layer.output_shape({3, 5}), ShapeError);
}

TEST_CASE("network spec validation") {
    CHECK(validate({{LayerSpec::lstm(4), LayerSpec::dense(1)}, 14, 30}) == Shape{1, 1});
    CHECK_THROWS_AS(validate({{LayerSpec::lstm(4), LayerSpec::dense(2)}, 14, 30}), ShapeError);
    CHECK_THROWS_AS(validate({{LayerSpec::lstm(4, true), LayerSpec::dense(1)}, 14, 30}), ShapeError);
    CHECK_THROWS_AS(validate({{LayerSpec::conv1d(4, 20), LayerSpec::flatten(), LayerSpec::dense(1)}, 14, 3}),
                    ShapeError);
}

TEST_CASE("network json round trip preserves predictions") {
    Rng rng(8);
    NetworkSpec spec{{LayerSpec::conv1d(3, 3), LayerSpec::conv1d(3, 3), LayerSpec::maxpool(2), LayerSpec::flatten(),
                      LayerSpec::repeat_vector(1), LayerSpec::lstm(4), LayerSpec::dense(5, DenseActivation::kRelu),
                      LayerSpec::dense(1)},
                     8,
                     3};
    Network net(spec, rng);
    const auto s = random_sample(5, 8, 3, rng);
    const auto j = net.to_json();
    auto back = Network::from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.spec() == spec);
    CHECK(back.predict(s.windows) == net.predict(s.windows));
    CHECK(back.to_json().dump() == j.dump());
    CHECK(network_spec_from_json(to_json(spec)) == spec);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Matrix w = numkernel::from_rows({{1.0, -2.0}});
    Matrix g = Matrix::Zero(1, 2);
    AdamState st;
    st.m.push_back(Matrix::Constant(1, 2, 0.5));
    st.v.push_back(Matrix::Constant(1, 2, 0.5));
    const Matrix before = w;
    adam_step(st, {{"w", &w, &g}});
    CHECK(st.step == 1);
    CHECK(st.m[0](0, 0) == doctest::Approx(0.45));
    CHECK(st.v[0](0, 0) == doctest::Approx(0.4995));
    // Moments are nonzero here, so only the zero-moment case is a no-op.
    AdamState fresh;
    Matrix w2 = before;
    adam_step(fresh, {{"w", &w2, &g}});
    CHECK(w2 == before);
}

TEST_CASE("adam: constant gradient moves by learning rate times sign") {
    Matrix w = numkernel::from_rows({{0.0, 0.0}});
    Matrix g = numkernel::from_rows({{3.0, -0.2}});
    AdamState st;
    st.learning_rate = 0.01;
    Matrix prev = w;
    for (int k = 0; k < 500; ++k) {
        prev = w;
        adam_step(st, {{"w", &w, &g}});
    }
    const Matrix step = w - prev;
    CHECK(step(0, 0) == doctest::Approx(-0.01).epsilon(0.05));
    CHECK(step(0, 1) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("training fits a constant target") {
    Rng rng(12);
    auto s = random_sample(64, 3, 2, rng);
    std::fill(s.targets.begin(), s.targets.end(), 0.7);
    TrainConfig cfg;
    cfg.max_epochs = 400;
    cfg.learning_rate = 0.01;
    cfg.seed = 3;
    auto model = train({{LayerSpec::dense(1)}, 1, 2}, dataset([&] {
                           Sample t;
                           for (auto& w : s.windows) t.windows.push_back(w.bottomRows(1));
                           t.targets = s.targets;
                           return t;
                       }()),
                       {}, cfg);
    for (double p : model.predict(dataset([&] {
             Sample t;
             for (auto& w : s.windows) t.windows.push_back(w.bottomRows(1) * 0.0);
             t.targets = s.targets;
             return t;
         }()))) {
        CHECK(p == doctest::Approx(0.7).epsilon(1e-3));
    }
}

TEST_CASE("training learns a linear function of the last step") {
    Rng rng(13);
    Sample tr = random_sample(200, 4, 2, rng), va = random_sample(50, 4, 2, rng);
    for (auto* s : {&tr, &va}) {
        for (std::size_t k = 0; k < s->windows.size(); ++k) {
            s->targets[k] = 0.5 * s->windows[k](3, 1);
        }
    }
    TrainConfig cfg;
    cfg.max_epochs = 150;
    cfg.learning_rate = 0.01;
    cfg.seed = 1;
    auto model = train({{LayerSpec::lstm(4), LayerSpec::dense(1)}, 4, 2}, dataset(tr), dataset(va), cfg);
    CHECK(model.validation_loss[model.best_epoch] < 1e-3);
}

TEST_CASE("full-batch training loss is non-increasing below the stability bound") {
    // Linear regression on standardized inputs: lr 1e-3 is far below 2 / L for
    // the MSE Hessian, and Adam's per-step movement is bounded by lr.
    Rng rng(14);
    Sample tr = random_sample(100, 1, 3, rng);
    for (std::size_t k = 0; k < tr.windows.size(); ++k) {
        tr.targets[k] = 0.5 * tr.windows[k](0, 0) - 0.2 * tr.windows[k](0, 2);
    }
    TrainConfig cfg;
    cfg.max_epochs = 100;
    cfg.batch_size = 100;
    cfg.patience = 100;
    cfg.learning_rate = 1e-3;
    auto model = train({{LayerSpec::dense(1)}, 1, 3}, dataset(tr), {}, cfg);
    for (std::size_t e = 1; e < model.train_loss.size(); ++e) {
        CHECK(model.train_loss[e] <= model.train_loss[e - 1]);
    }
}

TEST_CASE("training is deterministic and serializes") {
    Rng rng(15);
    Sample tr = random_sample(40, 3, 2, rng);
    TrainConfig cfg;
    cfg.max_epochs = 5;
    cfg.seed = 77;
    const NetworkSpec spec{{LayerSpec::lstm(3), LayerSpec::dense(1)}, 3, 2};
    auto a = train(spec, dataset(tr), {}, cfg);
    auto b = train(spec, dataset(tr), {}, cfg);
    CHECK(a.network.flat_parameters() == b.network.flat_parameters());
    CHECK(a.train_loss == b.train_loss);
    auto c = TrainedModel::from_json(nlohmann::json::parse(a.to_json().dump()));
    CHECK(c.network.flat_parameters() == a.network.flat_parameters());
    CHECK(c.train_loss == a.train_loss);
    CHECK(c.config.seed == 77);
}

TEST_CASE("divergent training reports the epoch") {
    Rng rng(16);
    Sample tr = random_sample(10, 2, 1, rng);
    tr.targets[3] = std::nan("");
    TrainConfig cfg;
    cfg.max_epochs = 3;
    try {
        train({{LayerSpec::flatten(), LayerSpec::dense(1)}, 2, 1}, dataset(tr), {}, cfg);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch() == 0);
    }
}

TEST_CASE("train config must be positive") {
    TrainConfig cfg;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
