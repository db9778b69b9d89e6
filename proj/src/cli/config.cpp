#include "epf/cli/config.hpp"

#include "epf/dataio/csv.hpp"
#include "epf/dataio/preprocess.hpp"
#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace epf::cli {

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

models::Sizing sizing_from(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "full") return models::Sizing{};
        if (name == "desk") return models::desk_sizing();
        throw ConfigError("sizing: expected \"full\", \"desk\" or an object, got '" + name + "'");
    }
    // Partial objects patch the full-size defaults field by field.
    return models::model_spec_from_json({{"id", "M1"}, {"sizing", j}}).sizing;
}

models::ModelSpec with_overrides(const models::ModelSpec& spec, const nlohmann::json& overrides) {
    if (overrides.is_null() || overrides.empty()) return spec;
    nlohmann::json j = models::to_json(spec);
    j.merge_patch(overrides);
    return models::model_spec_from_json(j);
}

}  // namespace

dataio::TimeSeriesTable DataSource::load() const {
    if (synth_seed) {
        numkernel::Rng rng(*synth_seed);
        return dataio::synth_generate(rng, synth_days).table;
    }
    if (!std::filesystem::exists(resolved_path)) {
        throw DataError("data file not found: " + resolved_path.string());
    }
    return dataio::clean(dataio::load_csv(resolved_path, dataio::Granularity::kDaily));
}

splits::SplitPlan ExperimentConfig::plan(std::size_t rows) const {
    return splits::walk_forward_folds(rows, validation_days, test_days);
}

void ExperimentConfig::restrict_models(const std::vector<std::string>& ids) {
    const models::Sizing sizing = models.empty() ? models::Sizing{} : models.front().sizing;
    std::vector<models::ModelSpec> out;
    for (const auto& id : ids) {
        const auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.id == id; });
        out.push_back(it != models.end() ? *it : models::build(id, sizing));
    }
    models = std::move(out);
}

nlohmann::json ExperimentConfig::resolved() const {
    nlohmann::json data;
    if (this->data.synth_seed) {
        data = {{"synth", {{"seed", *this->data.synth_seed}, {"days", this->data.synth_days}}}};
    } else {
        data = {{"path", this->data.path}};
    }
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& m : models) specs.push_back(models::to_json(m));
    return {{"data", data},
            {"models", specs},
            {"seeds", seeds},
            {"split", {{"validation_days", validation_days}, {"test_days", test_days}}},
            {"pipeline", models::to_json(pipeline)},
            {"metrics", {{"mape", metrics.mape}, {"tolerate_zeros", metrics.tolerate_zeros}}}};
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j,
                   {"data", "models", "seeds", "split", "sizing", "overrides", "pipeline", "metrics", "output_dir",
                    "workers"},
                   "config");
    ExperimentConfig c;
    try {
        const auto& data = j.at("data");
        reject_unknown(data, {"path", "synth"}, "config.data");
        if (data.contains("synth")) {
            const auto& s = data.at("synth");
            reject_unknown(s, {"seed", "days"}, "config.data.synth");
            c.data.synth_seed = s.at("seed").get<std::uint64_t>();
            c.data.synth_days = s.at("days").get<std::size_t>();
        } else {
            c.data.path = data.at("path").get<std::string>();
            const std::filesystem::path p(c.data.path);
            c.data.resolved_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        }

        const models::Sizing sizing = j.contains("sizing") ? sizing_from(j.at("sizing")) : models::Sizing{};
        const nlohmann::json overrides = j.value("overrides", nlohmann::json::object());
        if (!overrides.empty()) reject_unknown(overrides, {"sizing", "train", "selection", "narmax"}, "config.overrides");
        const auto& list = j.at("models");
        std::vector<nlohmann::json> entries;
        if (list.is_string()) {
            for (const auto& id : models::parse_model_list(list.get<std::string>())) entries.emplace_back(id);
        } else {
            for (const auto& e : list) entries.push_back(e);
        }
        if (entries.empty()) throw ConfigError("config.models: no models listed");
        for (const auto& e : entries) {
            models::ModelSpec spec = e.is_string() ? models::build(e.get<std::string>(), sizing)
                                                   : models::model_spec_from_json(e);
            spec = with_overrides(spec, overrides);
            if (std::any_of(c.models.begin(), c.models.end(), [&](const auto& m) { return m.id == spec.id; })) {
                throw ConfigError("config.models: " + spec.id + " listed twice");
            }
            c.models.push_back(std::move(spec));
        }

        c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (c.seeds.empty()) throw ConfigError("config.seeds: must not be empty");
        if (j.contains("split")) {
            const auto& s = j.at("split");
            reject_unknown(s, {"validation_days", "test_days"}, "config.split");
            c.validation_days = s.value("validation_days", c.validation_days);
            c.test_days = s.value("test_days", c.test_days);
        }
        if (j.contains("pipeline")) c.pipeline = models::pipeline_options_from_json(j.at("pipeline"));
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            reject_unknown(m, {"mape", "tolerate_zeros"}, "config.metrics");
            c.metrics.mape = m.value("mape", c.metrics.mape);
            c.metrics.tolerate_zeros = m.value("tolerate_zeros", c.metrics.tolerate_zeros);
        }
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        c.workers = j.value("workers", c.workers);
        if (c.workers == 0) throw ConfigError("config.workers: must be positive");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

nlohmann::json load_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(load_config_json(path), path.parent_path());
}

}  // namespace epf::cli
