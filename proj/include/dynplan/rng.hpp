#pragma once

#include <cstdint>
#include <array>
#include <limits>

namespace dynplan {

// SplitMix64 finalizer. Used to expand seeds and derive substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31u);
}

// Derives an independent seed for a child stream identified by `tag`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
    return mix64(parent ^ mix64(tag + 0x632be59bd9b4e019ull));
}

// Seed of episode `index` under `master_seed`. Every benchmark cell uses
// this mapping, so cells share the same set of episodes.
constexpr std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t index) {
    return derive_seed(master_seed, index);
}

// Stream tags for the named substreams.
namespace stream {
inline constexpr std::uint64_t kLanes = 1;
inline constexpr std::uint64_t kSpawn = 2;
inline constexpr std::uint64_t kObstacle = 3;
inline constexpr std::uint64_t kPlacement = 4;
inline constexpr std::uint64_t kModel = 5;
inline constexpr std::uint64_t kPlanner = 6;
inline constexpr std::uint64_t kPolicy = 7;
}  // namespace stream

// xoshiro256** 1.0 (Blackman & Vigna). Plain value type; copying it copies the stream.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

    void reseed(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
            word = z ^ (z >> 31u);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Poisson(lambda) by sequential multiplication (Knuth). Intended for small lambda.
    int poisson(double lambda) noexcept;

    // Standard normal via Box-Muller (one value per call, no caching).
    double normal() noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace dynplan
