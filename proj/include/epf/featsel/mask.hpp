#pragma once

#include "epf/dataio/catalog.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace epf::featsel {

inline constexpr std::size_t kDefaultSelected = 30;

// Bit vector over an arbitrary number of candidates; 0 or 1 per entry.
using Bits = std::vector<std::uint8_t>;

std::size_t popcount(const Bits& bits);

/// Selection over the 62-feature catalog.
struct FeatureMask {
    std::array<bool, dataio::kFeatureCount> bits{};
    std::string method;
    // Per-feature ranking value where the method defines one (|rho|, |beta|,
    // elimination round, ...); empty otherwise.
    std::vector<double> scores;

    std::size_t count() const;
    // Selected feature ids in catalog order.
    std::vector<std::string> selected() const;

    static FeatureMask from_bits(const Bits& bits, std::string method);
    static FeatureMask all(std::string method);

    bool operator==(const FeatureMask&) const = default;
};

// {"method": ..., "selected": ["F1", ...], "scores": {"F1": ..., ...}}
nlohmann::json to_json(const FeatureMask& mask);
FeatureMask mask_from_json(const nlohmann::json& j);

// One row per feature id, one column per mask: a check mark for selected,
// a cross otherwise, plus a final count row.
std::string checkmark_table(std::span<const FeatureMask> masks);

// Indices of the k largest scores, ties to the lower index, as a bit vector.
Bits top_k(std::span<const double> scores, std::size_t k);

}  // namespace epf::featsel
