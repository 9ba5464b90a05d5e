#include "hypequil/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypequil/random.hpp"
#include "hypequil/solver_error.hpp"

namespace hypequil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSweeps = 10000;
constexpr double kSweepTol = 1e-10;
constexpr std::size_t kMaxGridPoints = 20'000'000;

// <p, a> <= b
struct LinearConstraint {
    enum class Kind { ball, halfspace } kind;
    Vec a;
    double b;
};

void flatten(const ConvexRegion& region, std::vector<LinearConstraint>& out) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                out.push_back({LinearConstraint::Kind::ball, -1.0 * s.center.coords(), std::cosh(s.radius)});
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                out.push_back({LinearConstraint::Kind::halfspace, s.normal, 0.0});
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                for (const ConvexRegion& m : s.members) flatten(m, out);
            }
        },
        region.shape());
}

HPoint project_ball(const ConvexRegion::Ball& b, const HPoint& x) {
    const double d = dist(x, b.center);
    if (d <= b.radius) return x;
    return geodesic_point(x, b.center, b.radius / d);
}

HPoint project_halfspace(const ConvexRegion::HalfSpace& h, const HPoint& x) {
    const double a = minkowski_form_unchecked(x.coords(), h.normal);
    if (a <= 0.0) return x;
    // Foot of the perpendicular geodesic from x to the hyperplane <., n> = 0.
    return project_to_hyperboloid(x.coords() - a * h.normal);
}

// Maximises the concave dual sqrt(-<u,u>) - sum lambda_i b_i with
// u = x - sum lambda_i a_i, one coordinate at a time. The primal projection is
// u / |u|.
HPoint project_constraints(const std::vector<LinearConstraint>& cons, const HPoint& x) {
    std::vector<double> lambda(cons.size(), 0.0);
    Vec u = x.coords();
    HPoint p = x;
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        for (std::size_t i = 0; i < cons.size(); ++i) {
            const LinearConstraint& c = cons[i];
            Vec u0 = u + lambda[i] * c.a;
            const double alpha = -minkowski_form_unchecked(u0, u0);
            const double beta = minkowski_form_unchecked(u0, c.a);
            double li = 0.0;
            if (c.kind == LinearConstraint::Kind::halfspace) {
                li = std::max(0.0, beta);
            } else {
                // Here beta = -<u0, center> > 0 and b = cosh r > 1.
                const double bb = c.b * c.b;
                const double disc = std::max(0.0, beta * beta - alpha);
                const double s = c.b * std::sqrt(disc / (bb - 1.0));
                li = std::max(0.0, s - beta);
            }
            lambda[i] = li;
            u = u0 - li * c.a;
        }
        if (!(minkowski_form_unchecked(u, u) < 0.0) || !(u[0] > 0.0)) {
            throw ConvergenceError("projection onto intersection: dual iterate left the time cone (empty region?)");
        }
        const HPoint next = project_to_hyperboloid(u);
        const double move = dist(p, next);
        p = next;
        if (sweep > 0 && move < kSweepTol) return p;
    }
    throw ConvergenceError("projection onto intersection did not converge in 1e4 sweeps", p);
}

HPoint project_intersection(const ConvexRegion& region, const HPoint& x) {
    if (contains(region, x, 0.0)) return x;
    std::vector<LinearConstraint> cons;
    flatten(region, cons);
    return project_constraints(cons, x);
}

double ball_extent_from(const HPoint& w, const ConvexRegion& member) {
    if (!std::isfinite(member.extent())) return kInf;
    return dist(w, member.witness()) + member.extent();
}

}  // namespace

ConvexRegion ConvexRegion::ball(HPoint center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("ball radius must be positive and finite");
    HPoint w = center;
    return ConvexRegion(Ball{std::move(center), radius}, std::move(w), radius);
}

ConvexRegion ConvexRegion::halfspace(const Vec& normal) {
    if (normal.size() < 2) throw InputError("half-space normal needs at least 2 coordinates");
    const double q = minkowski_form_unchecked(normal, normal);
    if (std::abs(q - 1.0) > kInvariantTol) {
        throw InputError("half-space normal must be unit spacelike (<n,n> = 1), got " + std::to_string(q));
    }
    HalfSpace h{normal};
    const HPoint w = project_halfspace(h, HPoint::origin(normal.size() - 1));
    return ConvexRegion(std::move(h), w, kInf);
}

ConvexRegion ConvexRegion::intersection(std::vector<ConvexRegion> members) {
    if (members.empty()) throw InputError("intersection needs at least one member");
    const std::size_t n = members.front().dim();
    for (const ConvexRegion& m : members) {
        if (m.dim() != n) throw InputError("intersection members have different dimensions");
    }
    std::vector<LinearConstraint> cons;
    for (const ConvexRegion& m : members) flatten(m, cons);
    Intersection shape{std::move(members)};
    HPoint w = shape.members.front().witness();
    try {
        w = project_constraints(cons, w);
    } catch (const Error&) {
        throw DegenerateRegionError("intersection appears to be empty (no common point found)");
    }
    for (const ConvexRegion& m : shape.members) {
        if (!contains(m, w, 1e-8)) throw DegenerateRegionError("intersection appears to be empty");
    }
    double extent = kInf;
    for (const ConvexRegion& m : shape.members) extent = std::min(extent, ball_extent_from(w, m));
    return ConvexRegion(std::move(shape), std::move(w), extent);
}

ConvexRegion ConvexRegion::whole(std::size_t n) {
    if (n < 1 || n + 1 > kMaxAmbient) throw InputError("dimension out of range");
    return ConvexRegion(WholeSpace{}, HPoint::origin(n), kInf);
}

bool contains(const ConvexRegion& region, const HPoint& x, double tol) {
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                return dist(x, s.center) <= s.radius + tol;
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                return minkowski_form(x.coords(), s.normal) <= tol;
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                return std::all_of(s.members.begin(), s.members.end(),
                                   [&](const ConvexRegion& m) { return contains(m, x, tol); });
            } else {
                return true;
            }
        },
        region.shape());
}

HPoint project(const ConvexRegion& region, const HPoint& x) {
    if (x.dim() != region.dim()) throw InputError("project: dimension mismatch");
    return std::visit(
        [&](const auto& s) -> HPoint {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                return project_ball(s, x);
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                return project_halfspace(s, x);
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                return project_intersection(region, x);
            } else {
                return x;
            }
        },
        region.shape());
}

double distance_lower_bound(const ConvexRegion& region, const HPoint& x) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                return std::max(0.0, dist(x, s.center) - s.radius);
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                return std::asinh(std::max(0.0, minkowski_form_unchecked(x.coords(), s.normal)));
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                double m = 0.0;
                for (const ConvexRegion& member : s.members) m = std::max(m, distance_lower_bound(member, x));
                return m;
            } else {
                return 0.0;
            }
        },
        region.shape());
}

static void collect_normals(const ConvexRegion& region, const HPoint& p, double slack, std::vector<Vec>& out) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConvexRegion::Ball>) {
                const double d = dist(p, s.center);
                if (d >= s.radius - slack && d > 1e-12) out.push_back((-1.0 / d) * log_map(p, s.center).vec());
            } else if constexpr (std::is_same_v<T, ConvexRegion::HalfSpace>) {
                const double v = minkowski_form_unchecked(p.coords(), s.normal);
                if (std::asinh(-v) <= slack) {
                    const Vec t = TangentVec::project(p, s.normal).vec();
                    const double n = std::sqrt(std::max(0.0, minkowski_form_unchecked(t, t)));
                    if (n > 0.0) out.push_back((1.0 / n) * t);
                }
            } else if constexpr (std::is_same_v<T, ConvexRegion::Intersection>) {
                for (const ConvexRegion& m : s.members) collect_normals(m, p, slack, out);
            }
        },
        region.shape());
}

std::vector<Vec> active_normals(const ConvexRegion& region, const HPoint& p, double slack) {
    std::vector<Vec> out;
    collect_normals(region, p, slack, out);
    return out;
}

std::vector<HPoint> sample(const ConvexRegion& region, std::uint64_t seed, std::size_t count,
                           double bounding_radius) {
    if (!(bounding_radius > 0.0)) throw InputError("sample: bounding radius must be positive");
    std::vector<HPoint> out;
    if (count == 0) return out;
    out.reserve(count);
    Rng rng(seed);
    const double radius = std::min(bounding_radius, region.extent());
    std::size_t proposals = 0;
    while (out.size() < count) {
        HPoint p = random_point_in_ball(rng, region.witness(), radius);
        ++proposals;
        if (contains(region, p, 0.0)) out.push_back(std::move(p));
        if (proposals >= 1'000'000 && out.size() * 1000 < proposals) {
            throw SamplingError("sample: acceptance rate below 0.1% after 1e6 proposals");
        }
    }
    return out;
}

PointGrid::PointGrid(std::vector<HPoint> points, double spacing)
    : points_(std::move(points)), spacing_(spacing), cloud_(points_) {
    if (!(spacing > 0.0)) throw InputError("grid spacing must be positive");
}

PointGrid PointGrid::merged_with(const PointGrid& other) const {
    std::vector<HPoint> pts = points_;
    pts.insert(pts.end(), other.points_.begin(), other.points_.end());
    return PointGrid(std::move(pts), std::max(spacing_, other.spacing_));
}

std::vector<std::vector<double>> sphere_directions(std::size_t k, double theta, double phase) {
    if (k == 0) throw InputError("sphere_directions: k must be positive");
    if (k == 1) return {{1.0}, {-1.0}};
    if (k == 2) {
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(std::numbers::pi / theta)));
        std::vector<std::vector<double>> out;
        out.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double a = 2.0 * std::numbers::pi * (static_cast<double>(j) + phase) / static_cast<double>(m);
            out.push_back({std::cos(a), std::sin(a)});
        }
        return out;
    }
    // Latitude rings measured from the last axis; each ring carries a scaled
    // copy of a lower-dimensional direction set.
    const auto rings = static_cast<std::size_t>(std::max(1.0, std::ceil(std::numbers::pi / theta)));
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j <= rings; ++j) {
        const double phi = std::numbers::pi * static_cast<double>(j) / static_cast<double>(rings);
        const double sp = (j == 0 || j == rings) ? 0.0 : std::sin(phi);
        const double cp = j == 0 ? 1.0 : (j == rings ? -1.0 : std::cos(phi));
        if (sp == 0.0) {
            std::vector<double> pole(k, 0.0);
            pole[k - 1] = cp;
            out.push_back(std::move(pole));
            continue;
        }
        for (std::vector<double> d : sphere_directions(k - 1, theta / (2.0 * sp), phase)) {
            for (double& c : d) c *= sp;
            d.push_back(cp);
            out.push_back(std::move(d));
        }
    }
    return out;
}

PointGrid build_grid_around(const ConvexRegion& region, const HPoint& center, double spacing, double radius,
                            double phase) {
    if (!(spacing > 0.0)) throw InputError("build_grid: spacing must be positive");
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw InputError("build_grid: radius must be finite");
    const std::size_t n = center.dim();
    const std::vector<Vec> basis = tangent_basis(center);
    const auto rings = static_cast<std::size_t>(std::ceil(radius / spacing));

    // Size guard before allocating anything large.
    {
        double estimate = 1.0;
        for (std::size_t k = 1; k <= rings; ++k) {
            const double r = std::min(static_cast<double>(k) * spacing, radius);
            const double circ = 2.0 * std::numbers::pi * std::sinh(r) / spacing + 1.0;
            estimate += std::pow(circ, static_cast<double>(n - 1));
        }
        if (estimate > static_cast<double>(kMaxGridPoints)) {
            throw InputError("build_grid: grid would exceed " + std::to_string(kMaxGridPoints) +
                             " points; increase spacing or reduce the bounding radius");
        }
    }

    std::vector<HPoint> points;
    auto offer = [&](const HPoint& q) {
        if (contains(region, q, 0.0)) {
            points.push_back(q);
        } else if (distance_lower_bound(region, q) <= spacing) {
            HPoint p = project(region, q);
            if (contains(region, p, kInvariantTol)) points.push_back(std::move(p));
        }
    };

    offer(center);
    for (std::size_t k = 1; k <= rings; ++k) {
        const double r = std::min(static_cast<double>(k) * spacing, radius);
        const double theta = 0.5 * spacing / std::sinh(r);
        for (const std::vector<double>& dir : sphere_directions(n, theta, phase)) {
            Vec v(n + 1);
            for (std::size_t j = 0; j < n; ++j) v += (r * dir[j]) * basis[j];
            offer(exp_map_trusted(center, v));
        }
    }
    if (points.empty()) throw DegenerateRegionError("build_grid: no grid point lies in the region");
    return PointGrid(std::move(points), spacing);
}

PointGrid build_grid(const ConvexRegion& region, double spacing, double bounding_radius, double phase) {
    if (!(bounding_radius > 0.0)) throw InputError("build_grid: bounding radius must be positive");
    const double radius = std::min(bounding_radius, region.extent());
    return build_grid_around(region, region.witness(), spacing, radius, phase);
}

std::vector<HPoint> convex_hull_samples(const std::vector<HPoint>& E, std::size_t depth, std::size_t per_level,
                                        std::uint64_t seed) {
    if (E.empty()) throw InputError("convex_hull_samples: E must be nonempty");
    Rng rng(seed);
    std::vector<HPoint> all = E;
    std::vector<HPoint> level = E;
    for (std::size_t k = 1; k <= depth; ++k) {
        std::vector<HPoint> next;
        next.reserve(per_level);
        for (std::size_t i = 0; i < per_level; ++i) {
            const HPoint& u = level[rng.below(level.size())];
            const HPoint& v = level[rng.below(level.size())];
            next.push_back(geodesic_point(u, v, rng.uniform()));
        }
        all.insert(all.end(), next.begin(), next.end());
        level = std::move(next);
    }
    std::vector<HPoint> unique;
    unique.reserve(all.size());
    for (HPoint& p : all) {
        if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(std::move(p));
    }
    return unique;
}

}  // namespace hypequil
