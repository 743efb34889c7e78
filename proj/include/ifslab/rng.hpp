#pragma once

#include <cstdint>
#include <random>

namespace ifslab {

// All randomness flows through mt19937_64. Streams for independent trials are
// seeded with derive_seed(seed, trial) so that trial results do not depend on
// scheduling.
using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform double in [0,1) from the top 53 bits of one engine output.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

}  // namespace ifslab
