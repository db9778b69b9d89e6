#pragma once

#include "epf/featsel/swarm.hpp"

#include <optional>

namespace epf::featsel {

struct GaConfig {
    double crossover = 0.5;        // probability of single-point crossover per parent pair
    double mutation = 0.2;         // probability per child of flipping one uniformly chosen bit
    std::size_t population = 100;  // mating pool size; also children per generation
    std::size_t generations = 10000;
    std::size_t k = kDefaultSelected;
    std::size_t stall_limit = 0;   // stop after this many generations without improvement; 0 = never
};

/// Steady-state bitstring GA.
///
/// Each generation breeds `population` children from binary-tournament
/// parents (single-point crossover, then mutation, then random repair to k
/// bits). The best child replaces the worst pool member only when its fitness
/// is strictly lower. Returns the best pool member; history[g] is the best
/// pool fitness after generation g.
SearchResult ga_search(std::size_t dims, const MaskFitness& fitness, const GaConfig& config, numkernel::Rng& rng,
                       const std::optional<std::vector<Bits>>& initial = std::nullopt);

// Random repair: clears or sets uniformly chosen bits until exactly k are set.
void random_repair(Bits& bits, std::size_t k, numkernel::Rng& rng);

// GA-ELM with the same fitness as pso_select.
FeatureMask ga_select(const SelectionData& data, numkernel::Rng& rng, const GaConfig& config = {},
                      std::size_t elm_hidden = kDefaultElmHidden);

}  // namespace epf::featsel
