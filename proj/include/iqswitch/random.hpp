#ifndef IQSWITCH_RANDOM_HPP
#define IQSWITCH_RANDOM_HPP

#include <array>
#include <cstdint>
#include <random>

namespace iqswitch {

/// Per-trajectory random stream.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stream for replication `index` of an experiment seeded with `master_seed`.
///
/// The pair is hashed through SplitMix64 into four words that seed the
/// Mersenne Twister state, so streams for distinct (master_seed, index)
/// pairs start from unrelated states. `substream` separates independent
/// consumers inside one replication.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t substream = 0) {
    std::uint64_t state = master_seed;
    splitmix64(state);
    state ^= 0xD1B54A32D192ED03ull * (index + 1);
    splitmix64(state);
    state ^= 0x8CB92BA72F3D8DD7ull * (substream + 1);
    std::array<std::uint32_t, 8> words{};
    for (std::size_t k = 0; k < words.size(); k += 2) {
        const std::uint64_t w = splitmix64(state);
        words[k] = static_cast<std::uint32_t>(w);
        words[k + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-and-reject).
inline std::uint32_t uniform_below(Rng& rng, std::uint32_t bound) {
    std::uint64_t x = rng() & 0xFFFFFFFFull;
    std::uint64_t m = x * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
        const std::uint32_t threshold = static_cast<std::uint32_t>(-bound) % bound;
        while (low < threshold) {
            x = rng() & 0xFFFFFFFFull;
            m = x * bound;
            low = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::uint32_t>(m >> 32);
}

} // namespace iqswitch

#endif // IQSWITCH_RANDOM_HPP
