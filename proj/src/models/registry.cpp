#include "epf/models/registry.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace epf::models {

using featsel::Selector;
using neural::DenseActivation;
using neural::LayerSpec;

std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::kNarmax: return "narmax";
        case Architecture::kTwoStep: return "two-step";
        case Architecture::kEncoderDecoder: return "encoder-decoder";
        case Architecture::kTwoStage: return "two-stage";
    }
    return "?";
}

std::string_view to_string(Encoder e) {
    switch (e) {
        case Encoder::kNone: return "none";
        case Encoder::kLstm: return "lstm";
        case Encoder::kCnn: return "cnn";
        case Encoder::kConvLstm: return "convlstm";
    }
    return "?";
}

Sizing desk_sizing() {
    Sizing s;
    s.lstm_units = 12;
    s.dense_units = 8;
    s.conv_filters = 8;
    s.convlstm_filters = 4;
    return s;
}

namespace {

struct Row {
    std::string_view id;
    std::string_view name;
    Architecture architecture;
    Selector selector;
    Encoder encoder;
};

constexpr std::array<Row, 14> kRegistry{{
    {"M0", "NARMAX", Architecture::kNarmax, Selector::kNone, Encoder::kNone},
    {"M1", "PC-LSTM", Architecture::kTwoStep, Selector::kPearson, Encoder::kNone},
    {"M2", "PSO-ELM-LSTM", Architecture::kTwoStep, Selector::kPso, Encoder::kNone},
    {"M3", "GA-ELM-LSTM", Architecture::kTwoStep, Selector::kGa, Encoder::kNone},
    {"M4", "RFE-SVR-LSTM", Architecture::kTwoStep, Selector::kRfe, Encoder::kNone},
    {"M5", "LASSO-LSTM", Architecture::kTwoStep, Selector::kLasso, Encoder::kNone},
    {"M6", "LSTM-LSTM ED", Architecture::kEncoderDecoder, Selector::kNone, Encoder::kLstm},
    {"M7", "CNN-LSTM ED", Architecture::kEncoderDecoder, Selector::kNone, Encoder::kCnn},
    {"M8", "ConvLSTM ED", Architecture::kEncoderDecoder, Selector::kNone, Encoder::kConvLstm},
    {"M9", "PC-LSTM-LSTM ED", Architecture::kTwoStage, Selector::kPearson, Encoder::kLstm},
    {"M10", "PSO-ELM-LSTM-LSTM ED", Architecture::kTwoStage, Selector::kPso, Encoder::kLstm},
    {"M11", "GA-ELM-LSTM-LSTM ED", Architecture::kTwoStage, Selector::kGa, Encoder::kLstm},
    {"M12", "RFE-SVR-LSTM-LSTM ED", Architecture::kTwoStage, Selector::kRfe, Encoder::kLstm},
    {"M13", "LASSO-LSTM-LSTM ED", Architecture::kTwoStage, Selector::kLasso, Encoder::kLstm},
}};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::size_t registry_index(std::string_view id) {
    const auto key = upper(id);
    for (std::size_t i = 0; i < kRegistry.size(); ++i) {
        if (kRegistry[i].id == key) return i;
    }
    throw RegistryError("unknown model id '" + std::string(id) + "' (expected M0..M13)");
}

template <typename E>
E enum_from(std::string_view text, std::initializer_list<E> values) {
    for (auto v : values) {
        if (to_string(v) == text) return v;
    }
    throw ConfigError("unknown tag '" + std::string(text) + "'");
}

}  // namespace

neural::NetworkSpec ModelSpec::network(std::size_t features) const {
    const auto& s = sizing;
    neural::NetworkSpec net{{}, s.window, features};
    auto& layers = net.layers;
    switch (architecture) {
        case Architecture::kNarmax:
            throw ConfigError(id + " has no network");
        case Architecture::kTwoStep:
            layers = {LayerSpec::lstm(s.lstm_units), LayerSpec::dense(s.dense_units, DenseActivation::kRelu),
                      LayerSpec::dense(1)};
            return net;
        case Architecture::kEncoderDecoder:
        case Architecture::kTwoStage:
            break;
    }
    switch (encoder) {
        case Encoder::kLstm:
            layers.push_back(LayerSpec::lstm(s.lstm_units));
            break;
        case Encoder::kCnn:
            layers = {LayerSpec::conv1d(s.conv_filters, s.conv_kernel), LayerSpec::conv1d(s.conv_filters, s.conv_kernel),
                      LayerSpec::maxpool(s.pool), LayerSpec::flatten()};
            break;
        case Encoder::kConvLstm:
            layers.push_back(LayerSpec::convlstm(s.convlstm_filters, s.convlstm_kernel));
            break;
        case Encoder::kNone:
            throw ConfigError(id + ": encoder-decoder without an encoder");
    }
    layers.insert(layers.end(), {LayerSpec::repeat_vector(1), LayerSpec::lstm(s.lstm_units),
                                 LayerSpec::dense(s.dense_units, DenseActivation::kRelu), LayerSpec::dense(1)});
    neural::validate(net);
    return net;
}

const std::vector<std::string>& model_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& r : kRegistry) v.emplace_back(r.id);
        return v;
    }();
    return ids;
}

ModelSpec build(std::string_view id, const Sizing& sizing) {
    const auto& row = kRegistry[registry_index(id)];
    ModelSpec spec;
    spec.id = std::string(row.id);
    spec.name = std::string(row.name);
    spec.architecture = row.architecture;
    spec.selector = row.selector;
    spec.encoder = row.encoder;
    spec.sizing = sizing;
    return spec;
}

std::vector<std::string> parse_model_list(std::string_view text) {
    std::vector<std::string> out;
    auto add = [&](std::size_t i) {
        if (std::find(out.begin(), out.end(), kRegistry[i].id) == out.end()) out.emplace_back(kRegistry[i].id);
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        auto item = text.substr(pos, comma - pos);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        if (!item.empty()) {
            std::size_t sep = item.find("..");
            std::size_t sep_len = 2;
            if (sep == std::string_view::npos) {
                sep = item.find('-');
                sep_len = 1;
            }
            if (sep == std::string_view::npos) {
                add(registry_index(item));
            } else {
                const auto lo = registry_index(item.substr(0, sep));
                const auto hi = registry_index(item.substr(sep + sep_len));
                if (lo > hi) throw RegistryError("empty model range '" + std::string(item) + "'");
                for (auto i = lo; i <= hi; ++i) add(i);
            }
        }
        pos = comma + 1;
    }
    if (out.empty()) throw RegistryError("no models listed");
    return out;
}

nlohmann::json to_json(const ModelSpec& m) {
    const auto& s = m.sizing;
    nlohmann::json narmax{{"lags", m.narmax.lags},
                          {"degrees", m.narmax.degrees},
                          {"max_iterations", m.narmax.fit.max_iterations},
                          {"tolerance", m.narmax.fit.tolerance}};
    return {{"id", m.id},
            {"name", m.name},
            {"architecture", to_string(m.architecture)},
            {"selector", featsel::to_string(m.selector)},
            {"encoder", to_string(m.encoder)},
            {"sizing",
             {{"lstm_units", s.lstm_units},
              {"dense_units", s.dense_units},
              {"conv_filters", s.conv_filters},
              {"conv_kernel", s.conv_kernel},
              {"pool", s.pool},
              {"convlstm_filters", s.convlstm_filters},
              {"convlstm_kernel", s.convlstm_kernel},
              {"window", s.window}}},
            {"train", neural::to_json(m.train)},
            {"selection", featsel::to_json(m.selection)},
            {"narmax", narmax}};
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
    try {
        ModelSpec m = build(j.at("id").get<std::string>());
        if (j.contains("architecture") &&
            j.at("architecture").get<std::string>() != to_string(m.architecture)) {
            throw RegistryError(m.id + ": architecture tag does not match the registry");
        }
        if (j.contains("selector") &&
            featsel::selector_from_string(j.at("selector").get<std::string>()) != m.selector) {
            throw RegistryError(m.id + ": selector tag does not match the registry");
        }
        if (j.contains("encoder") &&
            enum_from(j.at("encoder").get<std::string>(),
                      {Encoder::kNone, Encoder::kLstm, Encoder::kCnn, Encoder::kConvLstm}) != m.encoder) {
            throw RegistryError(m.id + ": encoder tag does not match the registry");
        }
        if (j.contains("sizing")) {
            const auto& s = j.at("sizing");
            auto& z = m.sizing;
            z.lstm_units = s.value("lstm_units", z.lstm_units);
            z.dense_units = s.value("dense_units", z.dense_units);
            z.conv_filters = s.value("conv_filters", z.conv_filters);
            z.conv_kernel = s.value("conv_kernel", z.conv_kernel);
            z.pool = s.value("pool", z.pool);
            z.convlstm_filters = s.value("convlstm_filters", z.convlstm_filters);
            z.convlstm_kernel = s.value("convlstm_kernel", z.convlstm_kernel);
            z.window = s.value("window", z.window);
        }
        if (j.contains("train")) m.train = neural::train_config_from_json(j.at("train"));
        if (j.contains("selection")) m.selection = featsel::selector_config_from_json(j.at("selection"));
        if (j.contains("narmax")) {
            const auto& n = j.at("narmax");
            m.narmax.lags = n.value("lags", m.narmax.lags);
            m.narmax.degrees = n.value("degrees", m.narmax.degrees);
            m.narmax.fit.max_iterations = n.value("max_iterations", m.narmax.fit.max_iterations);
            m.narmax.fit.tolerance = n.value("tolerance", m.narmax.fit.tolerance);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model spec: ") + e.what());
    }
}

}  // namespace epf::models
