#pragma once

// Closed geodesically convex subsets of H^n and their discretisations.

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "hypequil/hyperbolic.hpp"
#include "hypequil/kernels.hpp"

namespace hypequil {

class ConvexRegion {
public:
    struct Ball {
        HPoint center;
        double radius;
    };
    /// {x : <x, normal> <= 0}, normal unit spacelike.
    struct HalfSpace {
        Vec normal;
    };
    struct Intersection {
        std::vector<ConvexRegion> members;
    };
    struct WholeSpace {};

    using Shape = std::variant<Ball, HalfSpace, Intersection, WholeSpace>;

    static ConvexRegion ball(HPoint center, double radius);
    static ConvexRegion halfspace(const Vec& normal);
    /// Throws DegenerateRegionError if no common point can be found.
    static ConvexRegion intersection(std::vector<ConvexRegion> members);
    static ConvexRegion whole(std::size_t n);

    const Shape& shape() const noexcept { return shape_; }
    /// A point known to lie in the region.
    const HPoint& witness() const noexcept { return witness_; }
    std::size_t dim() const noexcept { return witness_.dim(); }

    /// Upper bound on d(witness, p) over the region; +inf when unbounded.
    double extent() const noexcept { return extent_; }

private:
    ConvexRegion(Shape shape, HPoint witness, double extent)
        : shape_(std::move(shape)), witness_(std::move(witness)), extent_(extent) {}

    Shape shape_;
    HPoint witness_;
    double extent_;
};

bool contains(const ConvexRegion& region, const HPoint& x, double tol = kInvariantTol);

/// Metric projection. Balls and half-spaces use closed forms; intersections use
/// cyclic dual coordinate ascent over the member constraints (each step is a
/// one-constraint projection in the dual), stopping when successive primal
/// iterates move less than 1e-10. Throws ConvergenceError after 1e4 sweeps.
HPoint project(const ConvexRegion& region, const HPoint& x);

/// Lower bound on d(x, region); exact for balls and half-spaces.
double distance_lower_bound(const ConvexRegion& region, const HPoint& x);

/// Outward unit normals (tangent at p) of the member constraints whose
/// boundary lies within `slack` of p.
std::vector<Vec> active_normals(const ConvexRegion& region, const HPoint& p, double slack);

/// Deterministic rejection sample of `count` region points: exp_map of uniform
/// draws from the tangent ball of radius `bounding_radius` at the witness.
std::vector<HPoint> sample(const ConvexRegion& region, std::uint64_t seed, std::size_t count,
                           double bounding_radius);

/// Finite point set inside a region with a covering guarantee.
class PointGrid {
public:
    PointGrid(std::vector<HPoint> points, double spacing);

    const std::vector<HPoint>& points() const noexcept { return points_; }
    const PointCloud& cloud() const noexcept { return cloud_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const HPoint& operator[](std::size_t i) const noexcept { return points_[i]; }

    /// Upper bound on the distance from any covered region point to its nearest grid point.
    double spacing() const noexcept { return spacing_; }

    /// Index of the nearest grid point (lowest index on ties).
    std::size_t nearest(const HPoint& x) const { return kernels::nearest(x, cloud_); }

    /// Concatenation (duplicates kept); the spacing of the result is the larger one.
    PointGrid merged_with(const PointGrid& other) const;

private:
    std::vector<HPoint> points_;
    double spacing_;
    PointCloud cloud_;
};

/// Geodesic polar grid around the region witness covering region ∩ B(witness, bounding_radius)
/// with covering radius <= spacing. `phase` in [0,1) rotates the angular lattice.
/// Throws DegenerateRegionError when nothing survives the containment filter.
PointGrid build_grid(const ConvexRegion& region, double spacing, double bounding_radius, double phase = 0.0);

/// Same construction centred on an arbitrary region point.
PointGrid build_grid_around(const ConvexRegion& region, const HPoint& center, double spacing, double radius,
                            double phase = 0.0);

/// Unit directions in R^k whose angular covering radius is at most `theta`.
std::vector<std::vector<double>> sphere_directions(std::size_t k, double theta, double phase = 0.0);

/// Finite-depth sample of the iterated geodesic hull of E: level 0 is E, level k
/// holds `per_level` points t*u (+) (1-t)*v for random u, v from level k-1.
/// Returns the union of all levels with exact duplicates removed.
std::vector<HPoint> convex_hull_samples(const std::vector<HPoint>& E, std::size_t depth, std::size_t per_level,
                                        std::uint64_t seed);

}  // namespace hypequil
