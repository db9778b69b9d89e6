#include "epf/featsel/swarm.hpp"

#include "epf/errors.hpp"
#include "epf/numkernel/activation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace epf::featsel {

namespace {

struct Particle {
    std::vector<double> x, v, p;
    double p_fitness = std::numeric_limits<double>::infinity();
};

void validate(const PsoConfig& c) {
    if (c.particles == 0 || c.iterations == 0) {
        throw ConfigError("pso: particles and iterations must be positive");
    }
    if (c.c1 < 0 || c.c2 < 0 || c.inertia < 0 || c.inertia > 1) {
        throw ConfigError("pso: need c1, c2 >= 0 and 0 <= inertia <= 1");
    }
}

// One velocity/position update; returns whether the particle moved.
bool step(Particle& q, const std::vector<double>& g, const PsoConfig& c, double vmax, numkernel::Rng& rng) {
    bool moved = false;
    for (std::size_t j = 0; j < q.x.size(); ++j) {
        const double r1 = rng.uniform(), r2 = rng.uniform();
        double v = c.inertia * q.v[j] + c.c1 * r1 * (q.p[j] - q.x[j]) + c.c2 * r2 * (g[j] - q.x[j]);
        v = std::clamp(v, -vmax, vmax);
        q.v[j] = v;
        if (v != 0.0) {
            q.x[j] += v;
            moved = true;
        }
    }
    return moved;
}

std::string key_of(const Bits& bits) { return std::string(bits.begin(), bits.end()); }

}  // namespace

ContinuousResult pso_minimize(const Objective& objective, std::size_t dims, double lo, double hi,
                              const PsoConfig& config, numkernel::Rng& rng) {
    validate(config);
    if (dims == 0 || !(hi > lo)) {
        throw ConfigError("pso: need dims > 0 and hi > lo");
    }
    const double vmax = config.max_velocity * (hi - lo);
    std::vector<Particle> swarm(config.particles);
    ContinuousResult result;
    result.best_value = std::numeric_limits<double>::infinity();
    for (auto& q : swarm) {
        q.x.resize(dims);
        q.v.resize(dims);
        for (std::size_t j = 0; j < dims; ++j) {
            q.x[j] = rng.uniform(lo, hi);
            q.v[j] = rng.uniform(-(hi - lo), hi - lo) * 0.1;
        }
        q.p = q.x;
        q.p_fitness = objective(q.x);
        if (q.p_fitness < result.best_value) {
            result.best_value = q.p_fitness;
            result.best = q.x;
        }
    }
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const auto g = result.best;
        for (auto& q : swarm) {
            if (!step(q, g, config, vmax, rng)) {
                continue;
            }
            const double f = objective(q.x);
            if (f < q.p_fitness) {
                q.p_fitness = f;
                q.p = q.x;
            }
            if (f < result.best_value) {
                result.best_value = f;
                result.best = q.x;
            }
        }
        result.history.push_back(result.best_value);
    }
    return result;
}

void repair_to_k(Bits& bits, std::span<const double> priority, std::size_t k) {
    if (k > bits.size()) {
        throw ConfigError("cannot keep " + std::to_string(k) + " of " + std::to_string(bits.size()) + " bits");
    }
    std::vector<std::size_t> order(bits.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return priority[a] > priority[b]; });
    std::size_t count = popcount(bits);
    // Clear surplus from the lowest priorities upward.
    for (auto it = order.rbegin(); it != order.rend() && count > k; ++it) {
        if (bits[*it]) {
            bits[*it] = 0;
            --count;
        }
    }
    for (auto it = order.begin(); it != order.end() && count < k; ++it) {
        if (!bits[*it]) {
            bits[*it] = 1;
            ++count;
        }
    }
}

SearchResult pso_search(std::size_t dims, const MaskFitness& fitness, const PsoConfig& config,
                        numkernel::Rng& rng) {
    validate(config);
    if (config.k > dims) {
        throw ConfigError("pso: k exceeds the number of bits");
    }
    std::unordered_map<std::string, double> memo;
    SearchResult result;
    result.best_fitness = std::numeric_limits<double>::infinity();

    auto sample = [&](const std::vector<double>& x) {
        Bits bits(dims);
        for (std::size_t j = 0; j < dims; ++j) {
            bits[j] = numkernel::sigmoid(x[j]) > rng.uniform() ? 1 : 0;
        }
        repair_to_k(bits, x, config.k);
        return bits;
    };
    auto evaluate = [&](const Bits& bits) {
        const auto key = key_of(bits);
        if (const auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        ++result.evaluations;
        const double f = fitness(bits);
        memo.emplace(key, f);
        return f;
    };
    // Attractors are the realized masks in position space, so an improvement found by sampling
    // pulls the swarm even after positions have collapsed onto the global best.
    auto attractor = [&](const Bits& bits) {
        std::vector<double> a(dims);
        for (std::size_t j = 0; j < dims; ++j) a[j] = bits[j] ? config.init_range : -config.init_range;
        return a;
    };
    std::vector<double> g;
    auto consider = [&](Particle& q, const Bits& bits, double f) {
        if (f < q.p_fitness) {
            q.p_fitness = f;
            q.p = attractor(bits);
        }
        if (f < result.best_fitness) {
            result.best_fitness = f;
            result.best = bits;
            g = attractor(bits);
            return true;
        }
        return false;
    };

    std::vector<Particle> swarm(config.particles);
    for (auto& q : swarm) {
        q.x.resize(dims);
        q.v.resize(dims);
        for (std::size_t j = 0; j < dims; ++j) {
            q.x[j] = rng.uniform(-config.init_range, config.init_range);
            q.v[j] = rng.uniform(-1.0, 1.0);
        }
        const auto bits = sample(q.x);
        consider(q, bits, evaluate(bits));
    }
    std::size_t stall = 0;
    for (std::size_t it = 0; it < config.iterations; ++it) {
        bool improved = false;
        const auto g_now = g;
        for (auto& q : swarm) {
            if (!step(q, g_now, config, config.max_velocity, rng)) {
                continue;
            }
            const auto bits = sample(q.x);
            improved = consider(q, bits, evaluate(bits)) || improved;
        }
        result.history.push_back(result.best_fitness);
        stall = improved ? 0 : stall + 1;
        if (config.stall_limit > 0 && stall >= config.stall_limit) {
            break;
        }
    }
    return result;
}

FeatureMask pso_select(const SelectionData& data, numkernel::Rng& rng, const PsoConfig& config,
                       std::size_t elm_hidden) {
    const auto [train, validation] = chronological_split(data);
    ElmModel elm(data.features(), elm_hidden, rng);
    auto search_rng = rng.fork(0x9501);
    const auto result = pso_search(
        data.features(), [&](const Bits& bits) { return elm_fitness(elm, bits, train, validation); }, config,
        search_rng);
    return FeatureMask::from_bits(result.best, "pso-elm");
}

}  // namespace epf::featsel
