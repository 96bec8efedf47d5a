#pragma once

// Seeded generators for the property tests. SplitMix64 keeps the streams
// identical across standard libraries.

#include <cmath>
#include <cstdint>

#include "nevlab/core.hpp"

namespace nevlab::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    real uniform() { return static_cast<real>(next() >> 11) * 0x1p-53L; }
    real uniform(real lo, real hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in the disk |z| <= r.
    cplx disk(real r) { return std::polar(r * std::sqrt(uniform()), 2 * pi * uniform()); }

    /// Real part in [-re, re], imaginary part in (0, im].
    cplx upper(real re, real im) { return {uniform(-re, re), im * (1 - uniform())}; }

private:
    std::uint64_t state_;
};

inline constexpr std::uint64_t property_seed = 20240611;

}  // namespace nevlab::testing
