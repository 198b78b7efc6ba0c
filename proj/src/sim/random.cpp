#include "dfp/sim/random.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "dfp/error.hpp"

namespace dfp::sim {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<NodeId> sample_challengers(std::span<const NodeId> pool, std::uint64_t k, Rng& rng) {
    if (k > pool.size())
        throw ProtocolError(ErrorKind::Configuration,
                            fmt::format("cannot sample {} challengers from a pool of {}", k, pool.size()));
    std::vector<NodeId> work(pool.begin(), pool.end());
    // partial Fisher-Yates: the first k slots end up a uniform k-subset
    for (std::uint64_t i = 0; i < k; ++i) {
        auto j = i + uniform_below(rng, work.size() - i);
        std::swap(work[i], work[j]);
    }
    work.resize(k);
    std::sort(work.begin(), work.end());
    return work;
}

} // namespace dfp::sim
