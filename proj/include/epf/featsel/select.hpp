#pragma once

#include "epf/featsel/genetic.hpp"
#include "epf/featsel/lasso.hpp"
#include "epf/featsel/pearson.hpp"
#include "epf/featsel/svr.hpp"
#include "epf/featsel/swarm.hpp"

#include <nlohmann/json.hpp>

#include <string_view>

namespace epf::featsel {

enum class Selector { kNone, kPearson, kPso, kGa, kRfe, kLasso };

std::string_view to_string(Selector s);
// Accepts "none", "pc", "pso", "ga", "rfe", "lasso" (case-insensitive).
Selector selector_from_string(std::string_view name);

struct SelectorConfig {
    std::size_t k = kDefaultSelected;
    PsoConfig pso;
    GaConfig ga;
    SvrConfig svr = kRfeSvrConfig;
    std::size_t rfe_drop_per_round = 1;
    double lasso_lambda = kDefaultLassoLambda;
    std::size_t elm_hidden = kDefaultElmHidden;
};

nlohmann::json to_json(const SelectorConfig& c);
// Missing keys keep their defaults.
SelectorConfig selector_config_from_json(const nlohmann::json& j);

// kNone returns the all-features mask.
FeatureMask select_features(Selector selector, const SelectionData& data, const SelectorConfig& config,
                            numkernel::Rng& rng);

}  // namespace epf::featsel
