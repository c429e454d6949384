#pragma once

#include <cstdint>
#include <random>

namespace cfmec {

using Rng = std::mt19937_64;

/// Named sub-streams derived from a run's base seed. Every consumer of
/// randomness gets its own stream so that adding draws in one place never
/// shifts the sequence seen by another.
enum class Stream : std::uint64_t {
    scenario = 1,
    colocated_shadowing = 2,
    training_episode = 3,
    evaluation_episode = 4,
    actor_init = 5,
    critic_init = 6,
    exploration = 7,
    replay_sampling = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic seed for (base, stream, index).
std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, Stream stream, std::uint64_t index = 0)
{
    return Rng{derive_seed(base, stream, index)};
}

}  // namespace cfmec
