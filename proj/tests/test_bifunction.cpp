#include <cmath>

#include "doctest.h"
#include "hypequil/bifunction.hpp"
#include "hypequil/random.hpp"

using namespace hypequil;

namespace {

Term cosh_term(double w, const HPoint& a) { return Term{Term::Kind::cosh_dist, w, a}; }

ConvexRegion ball2() { return ConvexRegion::ball(HPoint::origin(2), 2.0); }

Objective cosh_sum() {
    return Objective::sum({cosh_term(1.0, HPoint::along_axis(2, 1, 0.8)), cosh_term(0.5, HPoint::along_axis(2, 2, 1.2))});
}

}  // namespace

TEST_CASE("optimization bifunction examples") {
    const Bifunction f = make_optimization_bifunction(Objective::sum({cosh_term(1.0, HPoint::origin(2))}));
    const HPoint x{std::cosh(1.0), std::sinh(1.0), 0.0};
    // oracle: g(y) - g(x) with the two distances in long double
    const long double oracle = 1.0L - std::cosh(1.0L);
    CHECK(std::abs(f(x, HPoint::origin(2)) - static_cast<double>(oracle)) <= 1e-14);
    CHECK(f(x, HPoint::origin(2)) == doctest::Approx(-0.54308).epsilon(1e-5));

    Rng rng(3);
    const Bifunction h = make_optimization_bifunction(cosh_sum());
    for (int k = 0; k < 50; ++k) {
        const HPoint a = random_point_in_ball(rng, HPoint::origin(2), 2.0);
        const HPoint b = random_point_in_ball(rng, HPoint::origin(2), 2.0);
        CHECK(h(a, a) == 0.0);
        CHECK(h(a, b) + h(b, a) == 0.0);
    }
    CHECK_THROWS_AS(make_optimization_bifunction(Objective::sum({cosh_term(-1.0, HPoint::origin(2))})), InputError);
    CHECK(h.optimization_objective().has_value());
    CHECK(Bifunction().is_zero());
}

TEST_CASE("scale_bifunction") {
    const Bifunction f = make_optimization_bifunction(cosh_sum());
    const Bifunction f2 = scale_bifunction(f, 2.0);
    const Bifunction f1 = scale_bifunction(f, 1.0);
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        const HPoint a = random_point_in_ball(rng, HPoint::origin(2), 2.0);
        const HPoint b = random_point_in_ball(rng, HPoint::origin(2), 2.0);
        CHECK(std::abs(f2(a, b) - 2.0 * f(a, b)) <= 1e-12);
        CHECK(f1(a, b) == f(a, b));
    }
    CHECK_THROWS_AS(scale_bifunction(f, 0.0), InputError);
    CHECK_THROWS_AS(scale_bifunction(f, -1.0), InputError);
}

TEST_CASE("row and column evaluation match pointwise calls") {
    const Bifunction f(RegularizedDiff{cosh_sum(), 0.01});
    const PointGrid grid = build_grid(ball2(), 0.3, 6.0);
    const HPoint z = HPoint::along_axis(2, 1, 0.4);
    std::vector<double> row(grid.size()), col(grid.size());
    f.eval_row(z, grid, row);
    f.eval_col(grid, z, col);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(row[i] == doctest::Approx(f(z, grid[i])).epsilon(1e-12));
        CHECK(col[i] == doctest::Approx(f(grid[i], z)).epsilon(1e-12));
    }
}

TEST_CASE("check_conditions on catalog and adversarial instances") {
    const ConvexRegion K = ball2();
    SUBCASE("optimization-type passes") {
        const ConditionReport r = check_conditions(make_optimization_bifunction(cosh_sum()), K, 1, 1000);
        CHECK(r.all_pass());
        for (std::size_t i = 0; i < 3; ++i) CHECK(r.clauses[i].worst <= 1e-8);
        // the hemicontinuity extrapolation carries O(t) truncation error
        CHECK(r.clauses[3].worst <= r.clauses[3].tolerance);
    }
    SUBCASE("regularized difference passes") {
        const double mu = 0.5 * 1.5 / std::cosh(4.0);
        CHECK(check_conditions(Bifunction(RegularizedDiff{cosh_sum(), mu}), K, 2, 1000).all_pass());
    }
    SUBCASE("distance fails monotonicity, witness replays") {
        const Bifunction f{DistanceBif{}};
        const ConditionReport r = check_conditions(f, K, 3, 200);
        CHECK_FALSE(r.clauses[1].pass);
        REQUIRE(r.clauses[1].witness.size() == 2);
        const HPoint& x = r.clauses[1].witness[0];
        const HPoint& y = r.clauses[1].witness[1];
        CHECK(r.clauses[1].worst == doctest::Approx(2.0 * dist(x, y)).epsilon(1e-12));
        CHECK(clause_violation(f, 1, r.clauses[1].witness) == doctest::Approx(r.clauses[1].worst).epsilon(1e-12));
        CHECK(r.clauses[0].pass);
    }
    SUBCASE("negative squared distance fails convexity") {
        const Bifunction f{NegSqDistanceBif{}};
        const ConditionReport r = check_conditions(f, K, 4, 200);
        CHECK_FALSE(r.clauses[2].pass);
        REQUIRE(r.clauses[2].witness.size() == 3);
        CHECK(clause_violation(f, 2, r.clauses[2].witness) == doctest::Approx(r.clauses[2].worst).epsilon(1e-12));
    }
    SUBCASE("max of differences is rejected on monotonicity") {
        const Objective h = Objective::sum({cosh_term(1.0, HPoint::along_axis(2, 2, -1.0))});
        const ConditionReport r = check_conditions(Bifunction(MaxDiff{cosh_sum(), h, 0.5}), K, 5, 200);
        CHECK_FALSE(r.clauses[1].pass);
        CHECK_FALSE(r.all_pass());
    }
    SUBCASE("deterministic") {
        const Bifunction f{DistanceBif{}};
        CHECK(check_conditions(f, K, 9, 100).to_json().dump() == check_conditions(f, K, 9, 100).to_json().dump());
    }
}

TEST_CASE("descriptor JSON") {
    const double mu = 0.01;
    const std::vector<Bifunction> fs{
        Bifunction(),
        make_optimization_bifunction(cosh_sum()),
        Bifunction(RegularizedDiff{cosh_sum(), mu}, 0.5),
        Bifunction(DistanceBif{}),
        Bifunction(NegSqDistanceBif{}),
    };
    Rng rng(6);
    const HPoint a = random_point_in_ball(rng, HPoint::origin(2), 2.0);
    const HPoint b = random_point_in_ball(rng, HPoint::origin(2), 2.0);
    for (const Bifunction& f : fs) {
        const json j = f.to_json();
        const Bifunction g = bifunction_from_json(j, "bifunction");
        CHECK(g.to_json() == j);
        CHECK(g(a, b) == f(a, b));
    }
    const json bad = json::parse(R"({"type":"objective-diff","terms":[{"w":1,"anchor":[1,0,0],"weight":2}]})");
    try {
        bifunction_from_json(bad, "bifunction");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "bifunction.terms[0].weight");
    }
    try {
        bifunction_from_json(json::parse(R"({"type":"spline"})"), "bifunction");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "bifunction.type");
    }
    CHECK_THROWS_AS(bifunction_from_json(json::parse(R"({"type":"objective-diff","terms":[{"w":-1,"anchor":[1,0,0]}]})"),
                                         "bifunction"),
                    ParseError);
}
