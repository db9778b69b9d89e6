#pragma once

#include "epf/numkernel/matrix.hpp"
#include "epf/numkernel/rng.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace epf::explain {

using numkernel::Matrix;
using numkernel::Vector;

// Black-box model: one prediction per row of its argument.
using Predictor = std::function<Vector(const Matrix&)>;

// Rows that stand in for absent features.
struct Background {
    Matrix rows;
};

/// Up to `n` distinct rows of `train` drawn uniformly without replacement
/// (all rows when train has fewer), kept in their original order.
Background sample_background(const Matrix& train, std::size_t n, numkernel::Rng& rng);

/// v(S): mean prediction over background rows with the features in S taken
/// from `instance` (interventional imputation). `present` has one flag per feature.
double coalition_value(const Predictor& f, const Vector& instance, const Background& background,
                       const std::vector<std::uint8_t>& present);

struct ShapExplanation {
    std::vector<double> phi;
    double base = 0.0;        // v(empty) = mean prediction over the background
    double prediction = 0.0;  // f(instance)
    Vector instance;
    std::size_t coalitions = 0;  // coalitions entering the regression
};

// Exact Shapley values by the subset formula. Throws FeasibilityError above 15 features.
ShapExplanation exact_shapley(const Predictor& f, const Vector& instance, const Background& background);

struct KernelShapConfig {
    // Coalitions besides the empty and full ones. Enumerates all of them
    // when this covers 2^d - 2, otherwise samples complementary pairs.
    std::size_t n_coalitions = 2048;
    std::uint64_t seed = 0;
};

/// Kernel SHAP: weighted least squares over coalitions with the Shapley
/// kernel, efficiency imposed as an equality constraint. Throws ConfigError
/// when n_coalitions < d + 2 and DegenerateError when the regression stays
/// rank deficient after one retry with twice the coalitions.
ShapExplanation kernel_shap(const Predictor& f, const Vector& instance, const Background& background,
                            const KernelShapConfig& config = {});

struct RankedFeature {
    std::size_t index = 0;
    std::string name;
    double mean_abs_phi = 0.0;
};

// Mean |phi| descending, ties by index. Throws ShapeError for no explanations.
std::vector<RankedFeature> importance_ranking(const std::vector<ShapExplanation>& explanations,
                                              const std::vector<std::string>& names);

nlohmann::json to_json(const std::vector<RankedFeature>& ranking);

struct DependenceRow {
    double value = 0.0;
    double phi = 0.0;
    double interaction_value = 0.0;
};

struct DependenceExport {
    std::string feature;
    std::string interaction;  // partner feature name
    std::vector<DependenceRow> rows;

    // feature,value,phi,interaction_value
    std::string to_csv() const;
};

/// One row per explanation. Without an explicit partner, picks the other
/// feature whose values correlate most strongly (in absolute value) with the
/// feature's attributions, ties to the lower index. Unknown names throw SchemaError.
DependenceExport dependence_export(const std::vector<ShapExplanation>& explanations,
                                   const std::vector<std::string>& names, std::string_view feature,
                                   std::optional<std::string_view> interaction = std::nullopt);

}  // namespace epf::explain
