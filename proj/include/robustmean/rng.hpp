#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "robustmean/vec.hpp"

namespace robustmean {

// SplitMix64 finalizer (Steele, Lea & Vigna's fmix64 variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based 64-bit generator: the state advances by the golden-gamma
// increment 0x9E3779B97F4A7C15 and each output is mix64(state). Seeding is
// free, so parallel work derives one stream per (seed, index) pair with
// substream(); distinct indices give statistically independent sequences.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // uniform on [0,1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1); never returns 0, safe under log()
    double next_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // standard normal via Box-Muller; the second value of each pair is cached
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_open();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // uniform integer in [0, n), unbiased (rejection)
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

inline SplitMix64 substream(std::uint64_t master, std::uint64_t index) {
    return SplitMix64(substream_seed(master, index));
}

inline Vec random_unit_vector(SplitMix64& rng, std::size_t d) {
    Vec u(d);
    while (true) {
        for (double& c : u) c = rng.next_normal();
        const double n = norm(u);
        if (n > 1e-300) {
            for (double& c : u) c /= n;
            return u;
        }
    }
}

// Fisher-Yates
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

}  // namespace robustmean
