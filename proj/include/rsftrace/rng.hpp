#pragma once

#include <cstdint>
#include <random>

namespace rsf {

// splitmix64 step; good enough to decorrelate nearby seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    splitmix64(s);
    return splitmix64(s);
}

// Independent generator for sample `index` of a run seeded with `seed`.
// Serial and parallel executions of the same run see identical streams.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix_seed(seed, index));
}

} // namespace rsf
