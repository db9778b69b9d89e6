#pragma once

#include "epf/featsel/data.hpp"
#include "epf/featsel/elm.hpp"
#include "epf/featsel/mask.hpp"
#include "epf/numkernel/rng.hpp"

#include <functional>
#include <span>

namespace epf::featsel {

// Lower is better.
using MaskFitness = std::function<double(const Bits&)>;
using Objective = std::function<double(std::span<const double>)>;

struct PsoConfig {
    double c1 = 0.5;
    double c2 = 0.3;
    double inertia = 0.7;
    std::size_t iterations = 10000;
    std::size_t particles = 20;
    std::size_t k = kDefaultSelected;
    double max_velocity = 4.0;   // per-coordinate clamp
    double init_range = 2.0;     // binary mode: positions start in U(-r, r)
    std::size_t stall_limit = 0; // stop after this many iterations without improvement; 0 = never
};

struct SearchResult {
    Bits best;
    double best_fitness = 0.0;
    std::vector<double> history;  // global best fitness after each iteration
    std::size_t evaluations = 0;
};

struct ContinuousResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::vector<double> history;
};

/// Plain continuous PSO: v <- w v + c1 r1 (p - x) + c2 r2 (g - x), x <- x + v,
/// with r1, r2 ~ U(0,1) drawn per coordinate and positions initialized in
/// [lo, hi]. Velocities are clamped to max_velocity * (hi - lo).
ContinuousResult pso_minimize(const Objective& objective, std::size_t dims, double lo, double hi,
                              const PsoConfig& config, numkernel::Rng& rng);

/// Binary PSO over `dims` bits with exactly config.k set. Each particle's
/// continuous position x maps to bits by sigmoid(x_j) > r_j (r_j ~ U(0,1)),
/// then is repaired to k bits: surplus bits with the lowest positions are
/// cleared, missing bits are filled from the highest unset positions. A
/// particle's mask is re-drawn and re-evaluated only after it moves.
/// Fitness values are memoized per mask.
SearchResult pso_search(std::size_t dims, const MaskFitness& fitness, const PsoConfig& config,
                        numkernel::Rng& rng);

// Sets exactly k bits, preferring high `priority` values.
void repair_to_k(Bits& bits, std::span<const double> priority, std::size_t k);

/// PSO-ELM: fitness is the validation MSE of a frozen-hidden-layer ELM on a
/// chronological 80/20 split of `data`.
FeatureMask pso_select(const SelectionData& data, numkernel::Rng& rng, const PsoConfig& config = {},
                       std::size_t elm_hidden = kDefaultElmHidden);

}  // namespace epf::featsel
