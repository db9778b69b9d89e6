#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/mask.hpp"

#include <span>

namespace epf::featsel {

// Sample correlation cov(x, y) / (sd_x sd_y); 0 when x is constant.
// Throws DegenerateError when y is constant or fewer than 2 points.
double pearson(std::span<const double> x, std::span<const double> y);

// Top-k features by |rho| (ties to the lower index); scores hold rho.
FeatureMask pearson_select(const SelectionData& data, std::size_t k = kDefaultSelected);

}  // namespace epf::featsel
