#include "epf/featsel/genetic.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

namespace epf::featsel {

void random_repair(Bits& bits, std::size_t k, numkernel::Rng& rng) {
    if (k > bits.size()) {
        throw ConfigError("cannot keep " + std::to_string(k) + " of " + std::to_string(bits.size()) + " bits");
    }
    std::size_t count = popcount(bits);
    while (count != k) {
        const std::uint8_t from = count > k ? 1 : 0;
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < bits.size(); ++j) {
            if (bits[j] == from) candidates.push_back(j);
        }
        bits[candidates[rng.below(candidates.size())]] = from ? 0 : 1;
        count = count > k ? count - 1 : count + 1;
    }
}

SearchResult ga_search(std::size_t dims, const MaskFitness& fitness, const GaConfig& config, numkernel::Rng& rng,
                       const std::optional<std::vector<Bits>>& initial) {
    if (config.population < 2 || config.generations == 0 || config.k > dims || dims < 2) {
        throw ConfigError("ga: need population >= 2, generations >= 1, dims >= 2 and k <= dims");
    }
    if (config.crossover < 0 || config.crossover > 1 || config.mutation < 0 || config.mutation > 1) {
        throw ConfigError("ga: probabilities must lie in [0, 1]");
    }
    SearchResult result;
    std::unordered_map<std::string, double> memo;
    auto evaluate = [&](const Bits& bits) {
        const std::string key(bits.begin(), bits.end());
        if (const auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        ++result.evaluations;
        const double f = fitness(bits);
        memo.emplace(key, f);
        return f;
    };

    std::vector<Bits> pool;
    if (initial) {
        if (initial->size() != config.population) {
            throw ConfigError("ga: initial population size mismatch");
        }
        for (const auto& b : *initial) {
            if (b.size() != dims || popcount(b) != config.k) {
                throw ConfigError("ga: initial chromosomes must have " + std::to_string(dims) + " bits with " +
                                  std::to_string(config.k) + " set");
            }
        }
        pool = *initial;
    } else {
        for (std::size_t i = 0; i < config.population; ++i) {
            Bits b(dims, 0);
            random_repair(b, config.k, rng);
            pool.push_back(std::move(b));
        }
    }
    std::vector<double> fit(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        fit[i] = evaluate(pool[i]);
    }
    auto best_index = [&] { return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin()); };
    auto tournament = [&]() -> const Bits& {
        const std::size_t a = rng.below(pool.size()), b = rng.below(pool.size());
        return fit[a] <= fit[b] ? pool[a] : pool[b];
    };

    std::size_t stall = 0;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        Bits best_child;
        double best_child_fit = std::numeric_limits<double>::infinity();
        for (std::size_t made = 0; made < config.population; made += 2) {
            Bits c1 = tournament(), c2 = tournament();
            if (rng.bernoulli(config.crossover)) {
                const std::size_t cut = 1 + rng.below(dims - 1);
                std::swap_ranges(c1.begin() + static_cast<std::ptrdiff_t>(cut), c1.end(),
                                 c2.begin() + static_cast<std::ptrdiff_t>(cut));
            }
            for (Bits* c : {&c1, &c2}) {
                if (rng.bernoulli(config.mutation)) {
                    auto& bit = (*c)[rng.below(dims)];
                    bit = bit ? 0 : 1;
                }
                random_repair(*c, config.k, rng);
                const double f = evaluate(*c);
                if (f < best_child_fit) {
                    best_child_fit = f;
                    best_child = *c;
                }
            }
        }
        const auto worst = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
        const double before = fit[best_index()];
        if (best_child_fit < fit[worst]) {
            pool[worst] = std::move(best_child);
            fit[worst] = best_child_fit;
        }
        const double after = fit[best_index()];
        result.history.push_back(after);
        stall = after < before ? 0 : stall + 1;
        if (config.stall_limit > 0 && stall >= config.stall_limit) {
            break;
        }
    }
    const auto b = best_index();
    result.best = pool[b];
    result.best_fitness = fit[b];
    return result;
}

FeatureMask ga_select(const SelectionData& data, numkernel::Rng& rng, const GaConfig& config,
                      std::size_t elm_hidden) {
    const auto [train, validation] = chronological_split(data);
    ElmModel elm(data.features(), elm_hidden, rng);
    auto search_rng = rng.fork(0x6a01);
    const auto result = ga_search(
        data.features(), [&](const Bits& bits) { return elm_fitness(elm, bits, train, validation); }, config,
        search_rng);
    return FeatureMask::from_bits(result.best, "ga-elm");
}

}  // namespace epf::featsel
