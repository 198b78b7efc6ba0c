#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "dfp/types.hpp"

namespace dfp::sim {

/// mt19937_64 output is fixed by the standard; the helpers below avoid
/// std::*_distribution, whose algorithms differ between standard libraries.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to (seed, index); used to give independent
/// streams to trials and sub-components.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Small-state generator for per-trial streams, where reseeding an
/// mt19937_64 every trial would dominate the cost.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double unit_double(Gen& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// True with probability p. Always consumes exactly one draw.
template <class Gen>
bool bernoulli(Gen& gen, double p) {
    return unit_double(gen) < p;
}

/// Uniform integer in [0, bound) by rejection. bound must be > 0.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = top - top % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

/// Uniform sample of k distinct nodes without replacement, returned in
/// ascending id order. Throws Configuration when k > pool.size().
std::vector<NodeId> sample_challengers(std::span<const NodeId> pool, std::uint64_t k, Rng& rng);

} // namespace dfp::sim
