// rng.hpp - deterministic stream-splittable randomness.
//
// Every stochastic routine in the library draws from an engine produced by
// make_stream(seed, stream): the same (seed, stream) pair always yields the
// same draw sequence, independent of thread count or call order. Monte Carlo
// loops use the chunk index as the stream id and reduce partial results in
// index order, so results are bitwise reproducible.
#pragma once

#include <cstdint>
#include <random>

namespace ionmirror::rng {

/// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent engine for the given logical stream of a seeded run.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{std::uint32_t(mix(seed) >> 32), std::uint32_t(mix(seed)),
                      std::uint32_t(mix(stream) >> 32), std::uint32_t(mix(stream)),
                      std::uint32_t(mix(seed ^ 0xa076'1d64'78bd'642fULL ^ stream))};
    return std::mt19937_64(seq);
}

} // namespace ionmirror::rng
