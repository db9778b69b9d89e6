#include "epf/featsel/mask.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace epf::featsel {

std::size_t popcount(const Bits& bits) {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

std::size_t FeatureMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::vector<std::string> FeatureMask::selected() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            out.push_back(dataio::feature_id(i));
        }
    }
    return out;
}

FeatureMask FeatureMask::from_bits(const Bits& bits, std::string method) {
    if (bits.size() != dataio::kFeatureCount) {
        throw ShapeError("feature mask needs " + std::to_string(dataio::kFeatureCount) + " bits, got " +
                         std::to_string(bits.size()));
    }
    FeatureMask m;
    m.method = std::move(method);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        m.bits[i] = bits[i] != 0;
    }
    return m;
}

FeatureMask FeatureMask::all(std::string method) {
    FeatureMask m;
    m.method = std::move(method);
    m.bits.fill(true);
    return m;
}

nlohmann::json to_json(const FeatureMask& mask) {
    nlohmann::json j{{"method", mask.method}, {"selected", mask.selected()}};
    nlohmann::json scores = nlohmann::json::object();
    for (std::size_t i = 0; i < mask.scores.size(); ++i) {
        scores[dataio::feature_id(i)] = mask.scores[i];
    }
    j["scores"] = scores;
    return j;
}

FeatureMask mask_from_json(const nlohmann::json& j) {
    FeatureMask m;
    try {
        m.method = j.at("method").get<std::string>();
        for (const auto& id : j.at("selected")) {
            const auto name = id.get<std::string>();
            const auto idx = dataio::feature_index(name);
            if (!idx) {
                throw SchemaError("mask selects unknown feature '" + name + "'");
            }
            m.bits[*idx] = true;
        }
        if (j.contains("scores") && !j.at("scores").empty()) {
            m.scores.assign(dataio::kFeatureCount, 0.0);
            for (const auto& [key, value] : j.at("scores").items()) {
                const auto idx = dataio::feature_index(key);
                if (!idx) {
                    throw SchemaError("mask scores unknown feature '" + key + "'");
                }
                m.scores[*idx] = value.get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed feature mask: ") + e.what());
    }
    return m;
}

std::string checkmark_table(std::span<const FeatureMask> masks) {
    std::ostringstream out;
    out << "Feature";
    for (const auto& m : masks) {
        std::string title = m.method;
        std::transform(title.begin(), title.end(), title.begin(), [](unsigned char c) { return std::toupper(c); });
        out << '\t' << title;
    }
    out << '\n';
    for (std::size_t i = 0; i < dataio::kFeatureCount; ++i) {
        out << dataio::feature_id(i);
        for (const auto& m : masks) {
            out << '\t' << (m.bits[i] ? "✓" : "✗");
        }
        out << '\n';
    }
    out << "Count";
    for (const auto& m : masks) {
        out << '\t' << m.count();
    }
    out << '\n';
    return out.str();
}

Bits top_k(std::span<const double> scores, std::size_t k) {
    if (k > scores.size()) {
        throw ConfigError("cannot select " + std::to_string(k) + " of " + std::to_string(scores.size()));
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto key = [&](std::size_t i) {
        return std::isnan(scores[i]) ? -std::numeric_limits<double>::infinity() : scores[i];
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
    Bits bits(scores.size(), 0);
    for (std::size_t r = 0; r < k; ++r) {
        bits[order[r]] = 1;
    }
    return bits;
}

}  // namespace epf::featsel
