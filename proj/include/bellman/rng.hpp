#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bellman {

// SplitMix64 (Steele, Lea & Flood, 2014). The generator and the distribution
// helpers below are fully specified here, so seeded runs reproduce
// bit-for-bit independent of platform or standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; always consumes exactly two words per variate
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925287 * u2);
    }

    // uniform integer in [0, n), Lemire multiply-shift
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Label-keyed seed derivation: depends only on (master, label), never on the
// order labels are requested in.
inline std::uint64_t seed_split(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return detail::mix64(detail::mix64(master + 0x9e3779b97f4a7c15ULL) ^ h);
}

}  // namespace bellman
