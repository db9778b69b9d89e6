#include "epf/neural/network.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <numeric>

namespace epf::neural {

Shape validate(const NetworkSpec& spec) {
    if (spec.window == 0 || spec.features == 0) {
        throw ShapeError("network input must have a positive window and feature count");
    }
    if (spec.layers.empty()) {
        throw ShapeError("network has no layers");
    }
    numkernel::Rng scratch(0);
    Shape shape{spec.window, spec.features};
    for (const auto& layer_spec : spec.layers) {
        shape = make_layer(layer_spec, shape, scratch)->output_shape(shape);
    }
    if (shape != Shape{1, 1}) {
        throw ShapeError("network output must be a single value, got " + std::to_string(shape.steps) + " x " +
                         std::to_string(shape.width));
    }
    return shape;
}

nlohmann::json to_json(const NetworkSpec& spec) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : spec.layers) {
        layers.push_back(to_json(l));
    }
    return {{"window", spec.window}, {"features", spec.features}, {"layers", layers}};
}

NetworkSpec network_spec_from_json(const nlohmann::json& j) {
    NetworkSpec spec;
    try {
        spec.window = j.at("window").get<std::size_t>();
        spec.features = j.at("features").get<std::size_t>();
        for (const auto& l : j.at("layers")) {
            spec.layers.push_back(layer_from_json(l));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed network spec: ") + e.what());
    }
    return spec;
}

Sequence make_batch(std::span<const Matrix> windows, std::span<const std::size_t> rows) {
    if (rows.empty()) {
        throw ShapeError("empty batch");
    }
    const auto& first = windows[rows.front()];
    const auto b = static_cast<Eigen::Index>(rows.size());
    Sequence batch(static_cast<std::size_t>(first.rows()), Matrix(b, first.cols()));
    for (Eigen::Index r = 0; r < b; ++r) {
        const Matrix& w = windows[rows[static_cast<std::size_t>(r)]];
        if (w.rows() != first.rows() || w.cols() != first.cols()) {
            throw ShapeError("windows in a batch differ in shape");
        }
        for (Eigen::Index t = 0; t < w.rows(); ++t) {
            batch[static_cast<std::size_t>(t)].row(r) = w.row(t);
        }
    }
    return batch;
}

Network::Network(NetworkSpec spec, numkernel::Rng& rng) : spec_(std::move(spec)) {
    validate(spec_);
    Shape shape{spec_.window, spec_.features};
    for (const auto& layer_spec : spec_.layers) {
        layers_.push_back(make_layer(layer_spec, shape, rng));
        shape = layers_.back()->output_shape(shape);
    }
}

Network::Network(const Network& other) : spec_(other.spec_) {
    for (const auto& l : other.layers_) {
        layers_.push_back(l->clone());
    }
}

Network& Network::operator=(const Network& other) {
    if (this != &other) {
        Network copy(other);
        *this = std::move(copy);
    }
    return *this;
}

Matrix Network::forward(const Sequence& batch) {
    if (batch.size() != spec_.window || batch.front().cols() != static_cast<Eigen::Index>(spec_.features)) {
        throw ShapeError("network input must be " + std::to_string(spec_.window) + " steps of " +
                         std::to_string(spec_.features) + " features");
    }
    Sequence x = batch;
    for (auto& l : layers_) {
        x = l->forward(x);
    }
    return x.front();
}

void Network::backward(const Matrix& grad) {
    Sequence g{grad};
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
        g = (*it)->backward(g);
    }
}

std::vector<ParamRef> Network::params() {
    std::vector<ParamRef> out;
    for (auto& l : layers_) {
        for (auto& p : l->params()) {
            out.push_back(p);
        }
    }
    return out;
}

void Network::zero_grad() {
    for (auto& p : params()) {
        p.grad->setZero();
    }
}

std::size_t Network::parameter_count() {
    std::size_t n = 0;
    for (auto& p : params()) {
        n += static_cast<std::size_t>(p.value->size());
    }
    return n;
}

std::vector<double> Network::predict(std::span<const Matrix> windows, std::size_t batch_size) {
    std::vector<double> out;
    out.reserve(windows.size());
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < windows.size(); start += batch_size) {
        const std::size_t end = std::min(windows.size(), start + batch_size);
        rows.resize(end - start);
        std::iota(rows.begin(), rows.end(), start);
        const Matrix y = forward(make_batch(windows, rows));
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
            out.push_back(y(r, 0));
        }
    }
    return out;
}

std::vector<double> Network::flat_parameters() {
    std::vector<double> out;
    for (auto& p : params()) {
        out.insert(out.end(), p.value->data(), p.value->data() + p.value->size());
    }
    return out;
}

void Network::set_flat_parameters(std::span<const double> values) {
    if (values.size() != parameter_count()) {
        throw ShapeError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                         std::to_string(values.size()));
    }
    std::size_t offset = 0;
    for (auto& p : params()) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), p.value->size(), p.value->data());
        offset += static_cast<std::size_t>(p.value->size());
    }
}

nlohmann::json Network::to_json() {
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (auto& p : layers_[i]->params()) {
            blocks.push_back({{"layer", i},
                              {"name", p.name},
                              {"rows", p.value->rows()},
                              {"cols", p.value->cols()},
                              {"values", std::vector<double>(p.value->data(), p.value->data() + p.value->size())}});
        }
    }
    return {{"spec", neural::to_json(spec_)}, {"parameters", blocks}};
}

Network Network::from_json(const nlohmann::json& j) {
    numkernel::Rng rng(0);
    Network net(network_spec_from_json(j.at("spec")), rng);
    try {
        const auto& blocks = j.at("parameters");
        std::size_t k = 0;
        for (std::size_t i = 0; i < net.layers_.size(); ++i) {
            for (auto& p : net.layers_[i]->params()) {
                if (k >= blocks.size()) {
                    throw ConfigError("network document is missing parameter blocks");
                }
                const auto& b = blocks[k++];
                if (b.at("layer").get<std::size_t>() != i || b.at("name").get<std::string>() != p.name ||
                    b.at("rows").get<Eigen::Index>() != p.value->rows() ||
                    b.at("cols").get<Eigen::Index>() != p.value->cols()) {
                    throw ConfigError("parameter block " + std::to_string(k - 1) + " does not match the spec");
                }
                const auto values = b.at("values").get<std::vector<double>>();
                if (values.size() != static_cast<std::size_t>(p.value->size())) {
                    throw ConfigError("parameter block " + std::to_string(k - 1) + " has the wrong length");
                }
                std::copy(values.begin(), values.end(), p.value->data());
            }
        }
        if (k != blocks.size()) {
            throw ConfigError("network document has extra parameter blocks");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed network document: ") + e.what());
    }
    return net;
}

}  // namespace epf::neural
