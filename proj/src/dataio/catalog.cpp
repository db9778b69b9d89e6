#include "epf/dataio/catalog.hpp"

#include <charconv>
#include <cstdio>

namespace epf::dataio {

std::string_view to_string(Category category) {
    switch (category) {
        case Category::kPrice: return "price";
        case Category::kProduction: return "production";
        case Category::kProductionPrognosis: return "production-prognosis";
        case Category::kConsumption: return "consumption";
        case Category::kConsumptionPrognosis: return "consumption-prognosis";
        case Category::kFxRate: return "fx-rate";
        case Category::kFlow: return "flow";
        case Category::kFlowDeviation: return "flow-deviation";
    }
    return "unknown";
}

namespace {

using C = Category;
constexpr std::string_view kNordPool = "Nord Pool";
constexpr std::string_view kEikon = "Thomson Reuters Eikon";
constexpr std::string_view kEntsoe = "Entsoe";
constexpr std::string_view kCalc = "Calculation";
constexpr std::string_view kEurMwh = "EUR/MWh";
constexpr std::string_view kMwh = "MWh";

constexpr std::array<FeatureInfo, kFeatureCount> kCatalog{{
    {"F1", "System day-ahead price, 1-day lag", kEurMwh, C::kPrice, kNordPool},
    {"F2", "SE1 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F3", "SE2 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F4", "SE3 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F5", "SE4 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F6", "FI day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F7", "DK1 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F8", "DK2 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F9", "NO1 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F10", "NO2 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F11", "NO3 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F12", "NO4 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F13", "NO5 day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F14", "EE day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F15", "LT day-ahead price", kEurMwh, C::kPrice, kNordPool},
    {"F16", "PL day-ahead price", "PLN/MWh", C::kPrice, kEikon},
    {"F17", "DE day-ahead price", kEurMwh, C::kPrice, kEikon},
    {"F18", "NL day-ahead price", kEurMwh, C::kPrice, kEikon},
    {"F19", "Nordic production", kMwh, C::kProduction, kNordPool},
    {"F20", "EE production", kMwh, C::kProduction, kNordPool},
    {"F21", "LT production", kMwh, C::kProduction, kNordPool},
    {"F22", "PL production", kMwh, C::kProduction, kEntsoe},
    {"F23", "DE production", kMwh, C::kProduction, kEntsoe},
    {"F24", "NL production", kMwh, C::kProduction, kEntsoe},
    {"F25", "Nordic production prognosis", kMwh, C::kProductionPrognosis, kNordPool},
    {"F26", "EE production prognosis", kMwh, C::kProductionPrognosis, kNordPool},
    {"F27", "LT production prognosis", kMwh, C::kProductionPrognosis, kNordPool},
    {"F28", "PL production prognosis", kMwh, C::kProductionPrognosis, kEntsoe},
    {"F29", "DE production prognosis", kMwh, C::kProductionPrognosis, kEntsoe},
    {"F30", "NL production prognosis", kMwh, C::kProductionPrognosis, kEntsoe},
    {"F31", "Nordic consumption", kMwh, C::kConsumption, kNordPool},
    {"F32", "EE consumption", kMwh, C::kConsumption, kNordPool},
    {"F33", "LT consumption", kMwh, C::kConsumption, kNordPool},
    {"F34", "PL consumption", kMwh, C::kConsumption, kEntsoe},
    {"F35", "DE consumption", kMwh, C::kConsumption, kEntsoe},
    {"F36", "NL consumption", kMwh, C::kConsumption, kEntsoe},
    {"F37", "Nordic consumption prognosis", kMwh, C::kConsumptionPrognosis, kNordPool},
    {"F38", "EE consumption prognosis", kMwh, C::kConsumptionPrognosis, kNordPool},
    {"F39", "LT consumption prognosis", kMwh, C::kConsumptionPrognosis, kNordPool},
    {"F40", "PL consumption prognosis", kMwh, C::kConsumptionPrognosis, kEntsoe},
    {"F41", "DE consumption prognosis", kMwh, C::kConsumptionPrognosis, kEntsoe},
    {"F42", "NL consumption prognosis", kMwh, C::kConsumptionPrognosis, kEntsoe},
    {"F43", "EUR/NOK", "NOK", C::kFxRate, kNordPool},
    {"F44", "EUR/SEK", "SEK", C::kFxRate, kNordPool},
    {"F45", "EUR/DKK", "DKK", C::kFxRate, kNordPool},
    {"F46", "EUR/PLN", "PLN", C::kFxRate, kEikon},
    {"F47", "NO2-NL flow", kMwh, C::kFlow, kNordPool},
    {"F48", "DK1-DE flow", kMwh, C::kFlow, kNordPool},
    {"F49", "DK2-DE flow", kMwh, C::kFlow, kNordPool},
    {"F50", "SE4-DE flow", kMwh, C::kFlow, kNordPool},
    {"F51", "SE4-PL flow", kMwh, C::kFlow, kNordPool},
    {"F52", "SE4-LT flow", kMwh, C::kFlow, kNordPool},
    {"F53", "FI-EE flow", kMwh, C::kFlow, kNordPool},
    {"F54", "FI-Russia flow", kMwh, C::kFlow, kNordPool},
    {"F55", "NO2-NL flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F56", "DK1-DE flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F57", "DK2-DE flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F58", "SE4-DE flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F59", "SE4-PL flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F60", "SE4-LT flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F61", "FI-EE flow deviation", kMwh, C::kFlowDeviation, kCalc},
    {"F62", "FI-Russia flow deviation", kMwh, C::kFlowDeviation, kCalc},
}};

}  // namespace

const std::array<FeatureInfo, kFeatureCount>& feature_catalog() { return kCatalog; }

std::optional<std::size_t> feature_index(std::string_view id) {
    if (id.size() < 2 || id.size() > 3 || id[0] != 'F' || id[1] == '0') {
        return std::nullopt;
    }
    std::size_t n = 0;
    const auto* end = id.data() + id.size();
    const auto [ptr, ec] = std::from_chars(id.data() + 1, end, n);
    if (ec != std::errc() || ptr != end || n < 1 || n > kFeatureCount) {
        return std::nullopt;
    }
    return n - 1;
}

std::string feature_id(std::size_t index) { return "F" + std::to_string(index + 1); }

std::string capacity_column(std::size_t flow_index) { return "cap_" + feature_id(flow_index); }

bool is_target_column(std::string_view name) {
    if (name == kTargetColumn) {
        return true;
    }
    if (name.size() != 10 || name.substr(0, 8) != "target_h") {
        return false;
    }
    const char a = name[8];
    const char b = name[9];
    if (a < '0' || a > '9' || b < '0' || b > '9') {
        return false;
    }
    return (a - '0') * 10 + (b - '0') < 24;
}

std::string hourly_target_column(int hour) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "target_h%02d", hour);
    return buf;
}

}  // namespace epf::dataio
