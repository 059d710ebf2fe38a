#pragma once

#include <cstdint>
#include <random>

namespace ignite {

using Rng = std::mt19937_64;

/// One step of the splitmix64 generator: advances `state` and returns the
/// mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent stream seed for (master, index, purpose). Distinct purposes
/// (data, init, batches, search, ...) never share a stream.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t purpose = 0) noexcept {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64(state);
    state ^= index * 0xD1B54A32D192ED03ULL;
    out ^= splitmix64(state);
    state ^= purpose * 0x8CB92BA72F3D8DD7ULL;
    out ^= splitmix64(state);
    return out;
}

namespace stream {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t init = 2;
inline constexpr std::uint64_t batches = 3;
inline constexpr std::uint64_t search = 4;
inline constexpr std::uint64_t oracle_check = 5;
}  // namespace stream

}  // namespace ignite
