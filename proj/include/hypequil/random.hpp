#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hypequil/hyperbolic.hpp"

namespace hypequil {

/// Seeded generator with platform-independent transforms. The standard
/// distributions are implementation-defined, which would break byte-identical
/// output across toolchains, so the conversions are written out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derives an independent stream for (seed, stream) pairs, e.g. one per trial.
    static Rng stream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    /// Standard normal via Box-Muller (no caching, so draws stay aligned).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// exp_map of a point drawn uniformly from the radius-`radius` ball of the
/// tangent space at `center`. Lies in the geodesic ball B(center, radius).
HPoint random_point_in_ball(Rng& rng, const HPoint& center, double radius);

/// Uniform direction in the tangent space at `base` (unit norm).
TangentVec random_unit_tangent(Rng& rng, const HPoint& base);

}  // namespace hypequil
