#pragma once

#include <cstdint>
#include <random>

namespace damsim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent per-agent generator derived from one master seed, so adding
/// or reordering downstream consumers never perturbs another agent's draws.
inline std::mt19937_64 make_agent_rng(uint64_t master_seed, uint64_t agent_index) {
    return std::mt19937_64(splitmix64(master_seed ^ splitmix64(agent_index + 1)));
}

} // namespace damsim
