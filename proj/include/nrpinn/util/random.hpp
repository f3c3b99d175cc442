#pragma once

// Seeded streams with fixed, library-independent transforms: std:: distributions are
// implementation-defined, which would tie artifacts to one standard library.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace nrpinn::util {

/// SplitMix64 finalizer; mixes a seed with a tag into an independent stream seed.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return mix(seed ^ mix(tag)); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : tag) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return derive_seed(seed, h);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in the open interval (0, 1).
    double open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    /// Uniform in (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * open01(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection keeps the draw exactly uniform
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }
    /// Standard normal via Box-Muller, one value per call.
    double normal() {
        const double u1 = open01();
        const double u2 = open01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace nrpinn::util
