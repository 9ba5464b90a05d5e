#include "hypequil/random.hpp"

namespace hypequil {

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

TangentVec random_unit_tangent(Rng& rng, const HPoint& base) {
    const std::vector<Vec> basis = tangent_basis(base);
    Vec v(base.ambient_dim());
    double norm2 = 0.0;
    do {
        v = Vec(base.ambient_dim());
        norm2 = 0.0;
        for (const Vec& b : basis) {
            const double c = rng.normal();
            v += c * b;
            norm2 += c * c;
        }
    } while (norm2 < 1e-24);
    v *= 1.0 / std::sqrt(norm2);
    return TangentVec::project(base, v);
}

HPoint random_point_in_ball(Rng& rng, const HPoint& center, double radius) {
    const TangentVec dir = random_unit_tangent(rng, center);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(center.dim()));
    return exp_map_trusted(center, r * dir.vec());
}

}  // namespace hypequil
