#include "epf/numkernel/rng.hpp"

#include <cmath>
#include <numbers>

namespace epf::numkernel {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::size_t Rng::below(std::size_t n) {
    // Lemire's multiply-shift with rejection of the biased zone.
    const auto bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t x = next_u64();
        const unsigned __int128 product = static_cast<unsigned __int128>(x) * bound;
        if (static_cast<std::uint64_t>(product) >= threshold) {
            return static_cast<std::size_t>(product >> 64);
        }
    }
}

Rng Rng::fork(std::uint64_t stream) const {
    return Rng(mix(mix(state_ ^ mix(stream + kGamma)) + stream));
}

}  // namespace epf::numkernel
