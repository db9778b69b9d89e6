#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace epf::numkernel {

/// SplitMix64 generator (Steele, Lea & Flood 2014).
///
/// The state is a 64-bit counter advanced by the golden-ratio increment
/// 0x9E3779B97F4A7C15; each output is the counter passed through the
/// finalizer with multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
/// Every derived draw (uniform, normal, bounded integer, shuffle) is written
/// out here rather than delegated to <random> distributions, whose output is
/// implementation-defined, so a seed yields the same sequence everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal by the Box-Muller transform.
    double normal();

    // Uniform integer in [0, n); n must be positive.
    std::size_t below(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    // Independent stream derived from this generator's seed and a stream id.
    // Does not advance this generator.
    Rng fork(std::uint64_t stream) const;

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }
    template <typename T>
    void shuffle(std::vector<T>& items) {
        shuffle(std::span<T>(items));
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace epf::numkernel
