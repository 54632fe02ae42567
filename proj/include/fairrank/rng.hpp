#pragma once

#include <cstdint>
#include <random>

namespace fairrank {

// splitmix64 finalizer; used to decorrelate user-provided seeds and to derive
// per-sample seeds so Monte Carlo results do not depend on worker count.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(mix64(seed));
}

// Worker cap: min(hardware_concurrency, FAIRRANK_THREADS). At least 1.
int worker_count();

}  // namespace fairrank
