#include <cmath>

#include "doctest.h"
#include "hypequil/descent.hpp"
#include "hypequil/random.hpp"
#include "hypequil/solver_error.hpp"

using namespace hypequil;

namespace {

Term cosh_term(double w, const HPoint& a) { return Term{Term::Kind::cosh_dist, w, a}; }
Term dist_term(double w, const HPoint& a) { return Term{Term::Kind::dist, w, a}; }

// argmin of sum w_i cosh d(., a_i): the normalized weighted sum of anchors
// (the objective is -<p, sum w_i a_i>, minimized by the hyperboloid point
// closest in direction to that timelike vector).
HPoint cosh_sum_minimizer(const std::vector<double>& w, const std::vector<HPoint>& a) {
    Vec s(a.front().ambient_dim());
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i].coords();
    long double q = -static_cast<long double>(s[0]) * s[0];
    for (std::size_t k = 1; k < s.size(); ++k) q += static_cast<long double>(s[k]) * s[k];
    const double inv = static_cast<double>(1.0L / std::sqrt(-q));
    return HPoint(inv * s);
}

double fd_directional(const Objective& g, const HPoint& p, const Vec& dir, double h) {
    return (g.value(exp_map_trusted(p, h * dir)) - g.value(exp_map_trusted(p, (-h) * dir))) / (2.0 * h);
}

}  // namespace

TEST_CASE("objective values") {
    const HPoint a = HPoint::along_axis(2, 1, 1.0);
    const HPoint p = HPoint::origin(2);
    CHECK(Objective().value(p) == 0.0);
    CHECK(Objective().is_zero());
    const Objective g = Objective::sum({cosh_term(2.0, a), dist_term(0.5, a)});
    CHECK(g.value(p) == doctest::Approx(2.0 * std::cosh(1.0) + 0.5).epsilon(1e-14));
    const Objective m({Piece{{cosh_term(1.0, a)}, 0.0}, Piece{{dist_term(1.0, a)}, 3.0}});
    CHECK(m.is_max());
    CHECK(m.value(p) == doctest::Approx(4.0));
    CHECK(m.scaled(2.0).value(p) == doctest::Approx(8.0));
    CHECK(m.plus(cosh_term(1.0, p)).value(p) == doctest::Approx(5.0));
}

TEST_CASE("piece gradients match finite differences") {
    Rng rng(17);
    const HPoint o = HPoint::origin(3);
    for (int k = 0; k < 30; ++k) {
        const HPoint a = random_point_in_ball(rng, o, 2.0);
        const HPoint b = random_point_in_ball(rng, o, 2.0);
        const HPoint p = random_point_in_ball(rng, o, 2.0);
        const Objective g = Objective::sum({cosh_term(1.3, a), dist_term(0.7, b)});
        const PieceGradient pg = g.piece_gradient(0, p, 0.0);
        CHECK(pg.kink_radius == 0.0);
        const Vec u = random_unit_tangent(rng, p).vec();
        CHECK(minkowski_form(pg.smooth, u) == doctest::Approx(fd_directional(g, p, u, 1e-6)).epsilon(1e-6));
    }
    // Closed form from the module notes: grad cosh d(x, .) at z = -x + cosh d(x,z) z.
    const HPoint x = HPoint::along_axis(2, 2, 0.9);
    const HPoint z = HPoint::along_axis(2, 1, 0.4);
    const Vec expected = (-1.0) * x.coords() + cosh_dist(x, z) * z.coords();
    CHECK(max_abs_diff(Objective::sum({cosh_term(1.0, x)}).piece_gradient(0, z, 0.0).smooth, expected) <= 1e-14);
}

TEST_CASE("distance term at its anchor") {
    const HPoint a = HPoint::along_axis(2, 1, 0.5);
    const Objective g = Objective::sum({dist_term(2.0, a)});
    const PieceGradient pg = g.piece_gradient(0, a, 1e-9);
    CHECK(pg.kink_radius == 2.0);
    CHECK(g.subgradient(a).norm() == 0.0);
}

TEST_CASE("min_norm_element") {
    SUBCASE("opposite gradients cancel") {
        const std::vector<PieceGradient> gens{{Vec{0, 1, 0}, 0.0}, {Vec{0, -1, 0}, 0.0}};
        CHECK(std::sqrt(std::max(0.0, minkowski_form(min_norm_element(gens), min_norm_element(gens)))) <= 1e-12);
    }
    SUBCASE("segment nearest point") {
        // conv{(1,1), (1,-1)} -> (1,0)
        const std::vector<PieceGradient> gens{{Vec{0, 1, 1}, 0.0}, {Vec{0, 1, -1}, 0.0}};
        const Vec v = min_norm_element(gens);
        CHECK(v[1] == doctest::Approx(1.0));
        CHECK(std::abs(v[2]) <= 1e-12);
    }
    SUBCASE("kink ball shrinks the vector") {
        const std::vector<PieceGradient> gens{{Vec{0, 3, 4}, 2.0}};
        const Vec v = min_norm_element(gens);
        CHECK(v[1] == doctest::Approx(1.8));
        CHECK(v[2] == doctest::Approx(2.4));
    }
    SUBCASE("normal cone absorbs an outward gradient") {
        const std::vector<PieceGradient> gens{{Vec{0, -2, 1}, 0.0}};
        const Vec v = min_norm_element(gens, {Vec{0, 1, 0}});
        CHECK(std::abs(v[1]) <= 1e-12);
        CHECK(v[2] == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(min_norm_element({}), InputError);
}

TEST_CASE("minimize: cosh sum reaches the closed-form minimizer") {
    Rng rng(23);
    const ConvexRegion whole = ConvexRegion::whole(2);
    for (int k = 0; k < 20; ++k) {
        std::vector<HPoint> anchors;
        std::vector<double> w;
        std::vector<Term> terms;
        for (int i = 0; i < 3; ++i) {
            anchors.push_back(random_point_in_ball(rng, HPoint::origin(2), 2.0));
            w.push_back(rng.uniform(0.1, 2.0));
            terms.push_back(cosh_term(w.back(), anchors.back()));
        }
        const HPoint start = random_point_in_ball(rng, HPoint::origin(2), 3.0);
        const DescentResult r = minimize(Objective::sum(terms), whole, start, DescentOptions{});
        CHECK(dist(r.z, cosh_sum_minimizer(w, anchors)) <= 1e-7);
        CHECK(r.residual < 1e-8);
    }
}

TEST_CASE("minimize: nonsmooth and constrained cases") {
    const HPoint a = HPoint::along_axis(2, 1, 0.6);
    SUBCASE("distance term plus a pull elsewhere stops on the kink") {
        // d(., a) + 0.1 cosh d(., o): |grad 0.1 cosh d(o, a)| = 0.1 sinh 0.6 < 1, so a wins.
        const Objective g = Objective::sum({dist_term(1.0, a), cosh_term(0.1, HPoint::origin(2))});
        const DescentResult r = minimize(g, ConvexRegion::whole(2), HPoint::along_axis(2, 2, 1.0), DescentOptions{});
        CHECK(dist(r.z, a) <= 1e-7);
    }
    SUBCASE("g = 0 inside a ball: projection") {
        const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 1.0);
        const HPoint x = HPoint::along_axis(2, 2, 2.5);
        const DescentResult r =
            minimize(Objective::sum({cosh_term(1.0, x)}), ball, HPoint::origin(2), DescentOptions{});
        CHECK(dist(r.z, HPoint::along_axis(2, 2, 1.0)) <= 1e-7);
    }
    SUBCASE("max of two symmetric cosh terms: the midpoint") {
        const HPoint b1 = HPoint::along_axis(2, 1, 0.9), b2 = HPoint::along_axis(2, 1, -0.9);
        const Objective g({Piece{{cosh_term(1.0, b1)}, 0.0}, Piece{{cosh_term(1.0, b2)}, 0.0}});
        const DescentResult r =
            minimize(g, ConvexRegion::whole(2), HPoint::along_axis(2, 1, 1.7), DescentOptions{});
        CHECK(dist(r.z, HPoint::origin(2)) <= 1e-7);
    }
    SUBCASE("kink against the boundary") {
        const HPoint b1 = HPoint::along_axis(2, 2, 0.9), b2 = HPoint::along_axis(2, 2, -0.9);
        const Objective g = Objective({Piece{{cosh_term(1.0, b1)}, 0.0}, Piece{{cosh_term(1.0, b2)}, 0.0}})
                                .plus(cosh_term(1.0, HPoint::along_axis(2, 1, 4.0)));
        const ConvexRegion ball = ConvexRegion::ball(HPoint::origin(2), 1.0);
        const DescentResult r = minimize(g, ball, HPoint::origin(2), DescentOptions{});
        // Symmetric in the second axis and pulled outward along the first: the boundary point on axis 1.
        CHECK(dist(r.z, HPoint::along_axis(2, 1, 1.0)) <= 1e-7);
    }
}

TEST_CASE("minimize errors") {
    const Objective g = Objective::sum({cosh_term(1.0, HPoint::along_axis(2, 1, 2.0))});
    DescentOptions o;
    o.max_iters = 1;
    try {
        minimize(g, ConvexRegion::whole(2), HPoint::along_axis(2, 2, 2.0), o);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.best().has_value());
    }
    o.max_iters = 100;
    o.tol = 0.0;
    CHECK_THROWS_AS(minimize(g, ConvexRegion::whole(2), HPoint::origin(2), o), InputError);
}
