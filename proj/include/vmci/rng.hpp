#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace vmci {

// Random numbers come from SplitMix64 (Steele, Lea & Flood 2014). The output
// for position k of the stream keyed by `key` is mix64(key + (k + 1) * golden),
// so any position is addressable without generating its predecessors and the
// bit stream is identical on every platform.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key for a child stream; distinct `index` values give unrelated streams.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) {
    return mix64(parent ^ mix64(index + kGoldenGamma));
}

/// 64-bit FNV-1a, used to fold names into seeds.
constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t key) : state_(key) {}

    std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound) by rejection, bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Seeded uniform permutation of 0..n-1 (Fisher-Yates, portable).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace vmci
