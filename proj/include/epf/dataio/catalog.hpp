#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace epf::dataio {

inline constexpr std::size_t kFeatureCount = 62;

enum class Category {
    kPrice,
    kProduction,
    kProductionPrognosis,
    kConsumption,
    kConsumptionPrognosis,
    kFxRate,
    kFlow,
    kFlowDeviation,
};

std::string_view to_string(Category category);

struct FeatureInfo {
    std::string_view id;  // "F1" .. "F62"
    std::string_view description;
    std::string_view unit;
    Category category;
    std::string_view source;
};

// The 62-feature catalog, indexed 0..61 for F1..F62.
const std::array<FeatureInfo, kFeatureCount>& feature_catalog();

// "F17" -> 16; nullopt for anything outside F1..F62.
std::optional<std::size_t> feature_index(std::string_view id);
std::string feature_id(std::size_t index);

// Flow features F47..F54 pair with deviation features F55..F62 and with
// hourly capacity columns named cap_F47..cap_F54.
inline constexpr std::size_t kFirstFlow = 46;
inline constexpr std::size_t kFirstFlowDeviation = 54;
inline constexpr std::size_t kInterconnectorCount = 8;

std::string capacity_column(std::size_t flow_index);

inline constexpr std::string_view kTargetColumn = "target";

// Accepts "target" and the per-hour targets "target_h00".."target_h23".
bool is_target_column(std::string_view name);
std::string hourly_target_column(int hour);

}  // namespace epf::dataio
