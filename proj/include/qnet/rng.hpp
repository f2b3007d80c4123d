#pragma once

#include <cstdint>
#include <random>

namespace qnet {

// One round of SplitMix64 (Steele, Lea & Flood). Bijective on 64-bit ints.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Whitens a (seed, stream) pair into an engine seed. Injective in the stream
// index for a fixed seed, so no two streams of one seed collide.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) + stream);
}

// Seeded random stream. The same (seed, stream) pair replays the same
// sequence bit for bit; distinct stream indices give independent sequences,
// which is what lets ensemble samples run in any order or in parallel.
// Streams may be moved across threads but never shared.
//
// Integer and [0,1) mappings are fixed here instead of going through
// std::uniform_*_distribution, whose output is implementation defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(derive_stream_seed(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0. Rejection keeps the draw unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
        std::uint64_t r;
        do {
            r = engine_();
        } while (r < min);
        return r % n;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace qnet
