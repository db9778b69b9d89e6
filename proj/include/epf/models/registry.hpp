#pragma once

#include "epf/featsel/select.hpp"
#include "epf/models/narmax.hpp"
#include "epf/neural/train.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace epf::models {

enum class Architecture { kNarmax, kTwoStep, kEncoderDecoder, kTwoStage };
enum class Encoder { kNone, kLstm, kCnn, kConvLstm };

std::string_view to_string(Architecture a);
std::string_view to_string(Encoder e);

// Layer widths shared by the registry. Defaults are the full-size configuration.
struct Sizing {
    std::size_t lstm_units = 300;
    std::size_t dense_units = 100;
    std::size_t conv_filters = 96;
    std::size_t conv_kernel = 3;
    std::size_t pool = 2;
    std::size_t convlstm_filters = 64;
    std::size_t convlstm_kernel = 3;
    std::size_t window = 14;

    bool operator==(const Sizing&) const = default;
};

// Small widths for desk-scale experiments and tests.
Sizing desk_sizing();

// Candidate structures for the NARMAX benchmark, ranked by validation MSE.
struct NarmaxSearch {
    std::vector<std::size_t> lags{1, 7, 14};
    std::vector<int> degrees{1, 2};
    NarmaxFitConfig fit;
};

struct ModelSpec {
    std::string id;
    std::string name;
    Architecture architecture = Architecture::kTwoStep;
    featsel::Selector selector = featsel::Selector::kNone;
    Encoder encoder = Encoder::kNone;
    Sizing sizing;
    neural::TrainConfig train;
    featsel::SelectorConfig selection;
    NarmaxSearch narmax;

    bool uses_network() const { return architecture != Architecture::kNarmax; }

    /// Layer stack for `features` inputs per step. Throws ConfigError for M0.
    ///   two-step:        LSTM(U) -> Dense(D, relu) -> Dense(1)
    ///   encoder (lstm):  LSTM(U)
    ///   encoder (cnn):   Conv(K)x2 -> MaxPool -> Flatten
    ///   encoder (conv):  ConvLSTM(F)
    ///   decoder:         RepeatVector(1) -> LSTM(U) -> Dense(D, relu) -> Dense(1)
    neural::NetworkSpec network(std::size_t features) const;
};

// Ids in registry order: M0..M13.
const std::vector<std::string>& model_ids();

/// Registry lookup. Throws RegistryError for an unknown id.
ModelSpec build(std::string_view id, const Sizing& sizing = {});

/// Expands "M1,M6", "M0..M13" and "M1-M5" (and mixtures) into registry ids.
std::vector<std::string> parse_model_list(std::string_view text);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace epf::models
