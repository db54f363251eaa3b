#pragma once

#include <cstdint>
#include <random>

namespace ipp {

using Rng = std::mt19937_64;

// Named substreams derived from a run seed. Values are part of the on-disk
// reproducibility contract; do not renumber.
enum class Stream : std::uint64_t {
    field = 1,
    pool = 2,
    planning = 3,
    cost = 4,
    resampling = 5,
    measurement = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
    return splitmix64(splitmix64(parent) ^ splitmix64(tag + 0x5851F42D4C957F2DULL));
}

inline std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0) {
    return derive_seed(derive_seed(parent, static_cast<std::uint64_t>(stream)), index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace ipp
