#include <cmath>

#include "doctest.h"
#include "hypequil/random.hpp"
#include "hypequil/region.hpp"
#include "hypequil/solver_error.hpp"

using namespace hypequil;

namespace {

HPoint on_axis(double r) { return HPoint{std::cosh(r), std::sinh(r), 0.0}; }

// {x : x_1 <= 0} through the origin, as a half-space normal.
const Vec kLeft{0, 1, 0};

ConvexRegion lens() {
    return ConvexRegion::intersection(
        {ConvexRegion::ball(HPoint::origin(2), 2.0), ConvexRegion::ball(HPoint::along_axis(2, 1, 2.5), 1.5)});
}

}  // namespace

TEST_CASE("contains examples") {
    const HPoint c = HPoint::origin(2);
    CHECK(contains(ConvexRegion::ball(c, 1.0), c));
    CHECK(contains(ConvexRegion::ball(c, 1.0), on_axis(1.0), 1e-9));
    CHECK(dist(c, on_axis(2.0)) == doctest::Approx(2.0));
    CHECK_FALSE(contains(ConvexRegion::ball(c, 1.0), on_axis(2.0)));
    CHECK(contains(ConvexRegion::halfspace(kLeft), on_axis(-0.5)));
    CHECK_FALSE(contains(ConvexRegion::halfspace(kLeft), on_axis(0.5)));
    CHECK(contains(ConvexRegion::whole(2), on_axis(40.0)));
}

TEST_CASE("region constructors validate") {
    CHECK_THROWS_AS(ConvexRegion::ball(HPoint::origin(2), 0.0), InputError);
    CHECK_THROWS_AS(ConvexRegion::ball(HPoint::origin(2), -1.0), InputError);
    CHECK_THROWS_AS(ConvexRegion::halfspace(Vec{1, 0, 0}), InputError);
    CHECK_THROWS_AS(ConvexRegion::intersection({}), InputError);
    CHECK_THROWS_AS(ConvexRegion::intersection({ConvexRegion::ball(HPoint::origin(2), 1.0),
                                                ConvexRegion::ball(HPoint::along_axis(2, 1, 5.0), 1.0)}),
                    DegenerateRegionError);
    const ConvexRegion k = lens();
    CHECK(contains(k, k.witness()));
}

TEST_CASE("project examples") {
    const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 1.0);
    const HPoint inside = on_axis(0.3);
    CHECK(project(ball, inside) == inside);
    CHECK(max_abs_diff(project(ball, on_axis(2.0)).coords(), on_axis(1.0).coords()) <= 1e-12);

    // Half-space: the image of on_axis(r), r > 0, is the origin.
    CHECK(dist(project(ConvexRegion::halfspace(kLeft), on_axis(1.3)), HPoint::origin(2)) <= 1e-12);

    const ConvexRegion k = lens();
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const HPoint x = random_point_in_ball(rng, HPoint::origin(2), 5.0);
        const HPoint y = random_point_in_ball(rng, HPoint::origin(2), 5.0);
        const HPoint px = project(k, x), py = project(k, y);
        CHECK(contains(k, px, 1e-8));
        CHECK(dist(px, py) <= dist(x, y) + 1e-8);
        // Projection is the nearest point: no sample of K is closer.
        CHECK(dist(x, px) <= dist(x, project(k, geodesic_point(px, k.witness(), 0.5))) + 1e-8);
    }
}

TEST_CASE("distance lower bound") {
    const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 1.0);
    CHECK(distance_lower_bound(ball, on_axis(3.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(distance_lower_bound(ball, on_axis(0.5)) <= 0.0);
    CHECK(distance_lower_bound(ConvexRegion::halfspace(kLeft), on_axis(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("active normals") {
    const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 1.0);
    const HPoint b = on_axis(1.0);
    const std::vector<Vec> n = active_normals(ball, b, 1e-9);
    REQUIRE(n.size() == 1);
    // Outward: moving along the normal leaves the ball.
    CHECK(dist(exp_map_trusted(b, 0.1 * n[0]), HPoint::origin(2)) == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(active_normals(ball, on_axis(0.5), 1e-6).empty());
}

TEST_CASE("sample") {
    const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 2.0);
    CHECK(sample(ball, 1, 0, 6.0).empty());
    const auto a = sample(ball, 42, 1000, 6.0);
    const auto b = sample(ball, 42, 1000, 6.0);
    REQUIRE(a.size() == 1000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(dist(a[i], HPoint::origin(2)) <= 2.0 + 1e-12);
    }
    CHECK_THROWS_AS(sample(ball, 1, 5, 0.0), InputError);
}

TEST_CASE("build_grid") {
    const HPoint c = HPoint::along_axis(2, 2, 0.4);
    const ConvexRegion small = ConvexRegion::ball(c, 0.3);
    const PointGrid coarse = build_grid(small, 1.0, 6.0);
    REQUIRE(!coarse.empty());
    CHECK(coarse[0] == c);

    const ConvexRegion k = lens();
    const PointGrid g = build_grid(k, 0.1, 6.0);
    for (const HPoint& p : g.points()) CHECK(contains(k, p, 1e-9));
    const auto probes = sample(k, 3, 100, 6.0);
    for (const HPoint& p : probes) CHECK(dist(p, g[g.nearest(p)]) <= 0.1 + 1e-12);

    // A shifted angular phase still covers.
    const PointGrid h = build_grid(k, 0.1, 6.0, 0.37);
    for (const HPoint& p : probes) CHECK(dist(p, h[h.nearest(p)]) <= 0.1 + 1e-12);
    CHECK_THROWS_AS(build_grid(k, 0.1, 0.0), InputError);
}

TEST_CASE("convex_hull_samples") {
    const HPoint x = on_axis(0.4);
    const HPoint y = HPoint::along_axis(2, 2, 1.1);
    const auto single = convex_hull_samples({x}, 4, 10, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == x);

    const double dxy = dist(x, y);
    for (const HPoint& p : convex_hull_samples({x, y}, 1, 20, 2)) {
        CHECK(std::abs(dist(x, p) + dist(p, y) - dxy) <= 1e-9);
    }

    const ConvexRegion k = lens();
    const auto pts = sample(k, 8, 6, 6.0);
    for (const HPoint& p : convex_hull_samples(pts, 3, 16, 4)) CHECK(contains(k, p, 1e-9));
}
