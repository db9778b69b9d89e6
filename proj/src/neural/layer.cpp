#include "epf/neural/layer.hpp"

#include "epf/errors.hpp"
#include "epf/neural/convlstm.hpp"
#include "epf/neural/layers.hpp"
#include "epf/neural/lstm.hpp"

#include <array>
#include <string_view>
#include <utility>

namespace epf::neural {

namespace {

constexpr std::array<std::pair<LayerKind, std::string_view>, 7> kKindNames{{
    {LayerKind::kLstm, "lstm"},
    {LayerKind::kDense, "dense"},
    {LayerKind::kConv1d, "conv1d"},
    {LayerKind::kMaxPool, "maxpool"},
    {LayerKind::kFlatten, "flatten"},
    {LayerKind::kRepeat, "repeat"},
    {LayerKind::kConvLstm, "convlstm"},
}};

constexpr std::array<std::pair<DenseActivation, std::string_view>, 3> kActivationNames{{
    {DenseActivation::kLinear, "linear"},
    {DenseActivation::kRelu, "relu"},
    {DenseActivation::kTanh, "tanh"},
}};

template <typename E, std::size_t N>
std::string name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, n] : table) {
        if (v == value) {
            return std::string(n);
        }
    }
    return "?";
}

template <typename E, std::size_t N>
E parse_name(const std::array<std::pair<E, std::string_view>, N>& table, const std::string& name,
             const char* what) {
    for (const auto& [v, n] : table) {
        if (n == name) {
            return v;
        }
    }
    throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
}

}  // namespace

LayerSpec LayerSpec::lstm(std::size_t units, bool return_sequences) {
    LayerSpec s;
    s.kind = LayerKind::kLstm;
    s.units = units;
    s.return_sequences = return_sequences;
    return s;
}

LayerSpec LayerSpec::dense(std::size_t units, DenseActivation act) {
    LayerSpec s;
    s.kind = LayerKind::kDense;
    s.units = units;
    s.activation = act;
    return s;
}

LayerSpec LayerSpec::conv1d(std::size_t filters, std::size_t kernel, DenseActivation act) {
    LayerSpec s;
    s.kind = LayerKind::kConv1d;
    s.units = filters;
    s.kernel = kernel;
    s.activation = act;
    return s;
}

LayerSpec LayerSpec::maxpool(std::size_t width) {
    LayerSpec s;
    s.kind = LayerKind::kMaxPool;
    s.width = width;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::kFlatten;
    return s;
}

LayerSpec LayerSpec::repeat_vector(std::size_t n) {
    LayerSpec s;
    s.kind = LayerKind::kRepeat;
    s.repeat = n;
    return s;
}

LayerSpec LayerSpec::convlstm(std::size_t filters, std::size_t kernel, ConvLstmLayout layout) {
    LayerSpec s;
    s.kind = LayerKind::kConvLstm;
    s.units = filters;
    s.kernel = kernel;
    s.layout = layout;
    return s;
}

nlohmann::json to_json(const LayerSpec& spec) {
    nlohmann::json j;
    j["kind"] = name_of(kKindNames, spec.kind);
    switch (spec.kind) {
        case LayerKind::kLstm:
            j["units"] = spec.units;
            j["return_sequences"] = spec.return_sequences;
            j["literal_output"] = spec.literal_output;
            break;
        case LayerKind::kDense:
            j["units"] = spec.units;
            j["activation"] = name_of(kActivationNames, spec.activation);
            break;
        case LayerKind::kConv1d:
            j["filters"] = spec.units;
            j["kernel"] = spec.kernel;
            j["activation"] = name_of(kActivationNames, spec.activation);
            break;
        case LayerKind::kMaxPool: j["width"] = spec.width; break;
        case LayerKind::kFlatten: break;
        case LayerKind::kRepeat: j["repeat"] = spec.repeat; break;
        case LayerKind::kConvLstm:
            j["filters"] = spec.units;
            j["kernel"] = spec.kernel;
            j["layout"] = spec.layout == ConvLstmLayout::kFeatureAxis ? "feature_axis" : "channels";
            j["return_sequences"] = spec.return_sequences;
            break;
    }
    return j;
}

LayerSpec layer_from_json(const nlohmann::json& j) {
    try {
        const auto kind = parse_name(kKindNames, j.at("kind").get<std::string>(), "layer kind");
        LayerSpec s;
        switch (kind) {
            case LayerKind::kLstm:
                s = LayerSpec::lstm(j.at("units").get<std::size_t>(), j.value("return_sequences", false));
                s.literal_output = j.value("literal_output", false);
                break;
            case LayerKind::kDense:
                s = LayerSpec::dense(j.at("units").get<std::size_t>(),
                                     parse_name(kActivationNames, j.value("activation", "linear"), "activation"));
                break;
            case LayerKind::kConv1d:
                s = LayerSpec::conv1d(j.at("filters").get<std::size_t>(), j.at("kernel").get<std::size_t>(),
                                      parse_name(kActivationNames, j.value("activation", "relu"), "activation"));
                break;
            case LayerKind::kMaxPool: s = LayerSpec::maxpool(j.at("width").get<std::size_t>()); break;
            case LayerKind::kFlatten: s = LayerSpec::flatten(); break;
            case LayerKind::kRepeat: s = LayerSpec::repeat_vector(j.at("repeat").get<std::size_t>()); break;
            case LayerKind::kConvLstm: {
                const auto layout = j.value("layout", "feature_axis");
                if (layout != "feature_axis" && layout != "channels") {
                    throw ConfigError("unknown convlstm layout '" + layout + "'");
                }
                s = LayerSpec::convlstm(j.at("filters").get<std::size_t>(), j.at("kernel").get<std::size_t>(),
                                        layout == "channels" ? ConvLstmLayout::kChannels
                                                             : ConvLstmLayout::kFeatureAxis);
                s.return_sequences = j.value("return_sequences", false);
                break;
            }
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed layer spec: ") + e.what());
    }
}

std::string describe(const LayerSpec& spec) {
    const auto n = [](std::size_t v) { return std::to_string(v); };
    switch (spec.kind) {
        case LayerKind::kLstm: return "LSTM(" + n(spec.units) + (spec.return_sequences ? ", seq)" : ")");
        case LayerKind::kDense:
            return "Dense(" + n(spec.units) + ", " + name_of(kActivationNames, spec.activation) + ")";
        case LayerKind::kConv1d: return "Conv1D(" + n(spec.units) + ", k=" + n(spec.kernel) + ")";
        case LayerKind::kMaxPool: return "MaxPool(" + n(spec.width) + ")";
        case LayerKind::kFlatten: return "Flatten";
        case LayerKind::kRepeat: return "RepeatVector(" + n(spec.repeat) + ")";
        case LayerKind::kConvLstm: return "ConvLSTM(" + n(spec.units) + ", k=" + n(spec.kernel) + ")";
    }
    return "?";
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Shape in, numkernel::Rng& rng) {
    if (in.steps == 0 || in.width == 0) {
        throw ShapeError("layer input shape must be non-empty");
    }
    std::unique_ptr<Layer> layer;
    switch (spec.kind) {
        case LayerKind::kLstm:
            if (spec.units == 0) {
                throw ConfigError("lstm: units must be positive");
            }
            layer = std::make_unique<LstmLayer>(LstmParams::random(in.width, spec.units, rng), spec.return_sequences,
                                                spec.literal_output);
            break;
        case LayerKind::kDense:
            if (spec.units == 0) {
                throw ConfigError("dense: units must be positive");
            }
            layer = std::make_unique<DenseLayer>(DenseLayer::random(in.width, spec.units, spec.activation, rng));
            break;
        case LayerKind::kConv1d:
            layer = std::make_unique<Conv1dLayer>(in.width, spec.units, spec.kernel, spec.activation, rng);
            break;
        case LayerKind::kMaxPool: layer = std::make_unique<MaxPoolLayer>(spec.width); break;
        case LayerKind::kFlatten: layer = std::make_unique<FlattenLayer>(); break;
        case LayerKind::kRepeat:
            if (spec.repeat == 0) {
                throw ConfigError("repeat: count must be positive");
            }
            layer = std::make_unique<RepeatLayer>(spec.repeat);
            break;
        case LayerKind::kConvLstm: {
            if (spec.units == 0) {
                throw ConfigError("convlstm: filters must be positive");
            }
            const bool by_feature = spec.layout == ConvLstmLayout::kFeatureAxis;
            const std::size_t positions = by_feature ? in.width : 1;
            const std::size_t channels = by_feature ? 1 : in.width;
            layer = std::make_unique<ConvLstmLayer>(
                ConvLstmParams::random(positions, channels, spec.units, spec.kernel, rng), spec.layout,
                spec.return_sequences);
            break;
        }
    }
    layer->output_shape(in);
    return layer;
}

}  // namespace epf::neural
