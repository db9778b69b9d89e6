#include "epf/featsel/select.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace epf::featsel {

std::string_view to_string(Selector s) {
    switch (s) {
        case Selector::kNone: return "none";
        case Selector::kPearson: return "pc";
        case Selector::kPso: return "pso-elm";
        case Selector::kGa: return "ga-elm";
        case Selector::kRfe: return "rfe-svr";
        case Selector::kLasso: return "lasso";
    }
    return "?";
}

Selector selector_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto s : {Selector::kNone, Selector::kPearson, Selector::kPso, Selector::kGa, Selector::kRfe,
                   Selector::kLasso}) {
        const auto tag = to_string(s);
        // Accept the bare search-method prefix as well ("pso" for "pso-elm").
        if (tag == lower || tag.substr(0, tag.find('-')) == lower) return s;
    }
    throw ConfigError("unknown selector '" + std::string(name) + "'");
}

nlohmann::json to_json(const SelectorConfig& c) {
    return {{"k", c.k},
            {"pso",
             {{"c1", c.pso.c1},
              {"c2", c.pso.c2},
              {"inertia", c.pso.inertia},
              {"iterations", c.pso.iterations},
              {"particles", c.pso.particles},
              {"max_velocity", c.pso.max_velocity},
              {"init_range", c.pso.init_range},
              {"stall_limit", c.pso.stall_limit}}},
            {"ga",
             {{"crossover", c.ga.crossover},
              {"mutation", c.ga.mutation},
              {"population", c.ga.population},
              {"generations", c.ga.generations},
              {"stall_limit", c.ga.stall_limit}}},
            {"svr", {{"c", c.svr.c}, {"epsilon", c.svr.epsilon}, {"tolerance", c.svr.tolerance},
                     {"max_iterations", c.svr.max_iterations}}},
            {"rfe_drop_per_round", c.rfe_drop_per_round},
            {"lasso_lambda", c.lasso_lambda},
            {"elm_hidden", c.elm_hidden}};
}

SelectorConfig selector_config_from_json(const nlohmann::json& j) {
    SelectorConfig c;
    try {
        c.k = j.value("k", c.k);
        if (j.contains("pso")) {
            const auto& p = j.at("pso");
            c.pso.c1 = p.value("c1", c.pso.c1);
            c.pso.c2 = p.value("c2", c.pso.c2);
            c.pso.inertia = p.value("inertia", c.pso.inertia);
            c.pso.iterations = p.value("iterations", c.pso.iterations);
            c.pso.particles = p.value("particles", c.pso.particles);
            c.pso.max_velocity = p.value("max_velocity", c.pso.max_velocity);
            c.pso.init_range = p.value("init_range", c.pso.init_range);
            c.pso.stall_limit = p.value("stall_limit", c.pso.stall_limit);
        }
        if (j.contains("ga")) {
            const auto& g = j.at("ga");
            c.ga.crossover = g.value("crossover", c.ga.crossover);
            c.ga.mutation = g.value("mutation", c.ga.mutation);
            c.ga.population = g.value("population", c.ga.population);
            c.ga.generations = g.value("generations", c.ga.generations);
            c.ga.stall_limit = g.value("stall_limit", c.ga.stall_limit);
        }
        if (j.contains("svr")) {
            const auto& s = j.at("svr");
            c.svr.c = s.value("c", c.svr.c);
            c.svr.epsilon = s.value("epsilon", c.svr.epsilon);
            c.svr.tolerance = s.value("tolerance", c.svr.tolerance);
            c.svr.max_iterations = s.value("max_iterations", c.svr.max_iterations);
        }
        c.rfe_drop_per_round = j.value("rfe_drop_per_round", c.rfe_drop_per_round);
        c.lasso_lambda = j.value("lasso_lambda", c.lasso_lambda);
        c.elm_hidden = j.value("elm_hidden", c.elm_hidden);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed selector config: ") + e.what());
    }
    c.pso.k = c.k;
    c.ga.k = c.k;
    return c;
}

FeatureMask select_features(Selector selector, const SelectionData& data, const SelectorConfig& config,
                            numkernel::Rng& rng) {
    auto pso = config.pso;
    auto ga = config.ga;
    pso.k = ga.k = config.k;
    switch (selector) {
        case Selector::kNone: return FeatureMask::all("none");
        case Selector::kPearson: return pearson_select(data, config.k);
        case Selector::kPso: return pso_select(data, rng, pso, config.elm_hidden);
        case Selector::kGa: return ga_select(data, rng, ga, config.elm_hidden);
        case Selector::kRfe: return rfe_svr_select(data, config.k, config.rfe_drop_per_round, config.svr).mask;
        case Selector::kLasso: return lasso_select(data, config.lasso_lambda, config.k);
    }
    throw ConfigError("unknown selector");
}

}  // namespace epf::featsel
