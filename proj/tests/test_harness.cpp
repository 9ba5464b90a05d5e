#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "hypequil/harness.hpp"
#include "hypequil/random.hpp"

using namespace hypequil;

namespace {

Term cosh_term(double w, const HPoint& a) { return Term{Term::Kind::cosh_dist, w, a}; }

ConvexRegion ball2() { return ConvexRegion::ball(HPoint::origin(2), 2.0); }

Objective cosh_sum() {
    return Objective::sum({cosh_term(1.0, HPoint::along_axis(2, 1, 0.8)), cosh_term(0.5, HPoint::along_axis(2, 2, 1.2))});
}

Bifunction regularized() { return Bifunction(RegularizedDiff{cosh_sum(), 0.5 * 1.5 / std::cosh(4.0)}); }

}  // namespace

TEST_CASE("stewart identity") {
    const HPoint x = HPoint::along_axis(2, 1, 1.3);
    const HPoint y = HPoint::along_axis(2, 2, -0.4);
    // z on [x, y]
    CHECK(std::abs(stewart_slack(x, y, geodesic_point(x, y, 0.3), 0.6)) <= 1e-12);
    const HPoint z = HPoint::along_axis(2, 1, -2.0);
    CHECK(std::abs(stewart_slack(x, y, z, 0.0)) <= 1e-14);
    CHECK(std::abs(stewart_slack(x, y, z, 1.0)) <= 1e-14);
    // independent evaluation of both sides
    const double d = dist(x, y), t = 0.35;
    const double lhs = std::cosh(dist(geodesic_point(x, y, t), z)) * std::sinh(d);
    const double rhs = std::cosh(dist(x, z)) * std::sinh(t * d) + std::cosh(dist(y, z)) * std::sinh((1 - t) * d);
    CHECK(std::abs(lhs - rhs) / rhs <= 1e-12);

    const PropertyVerdict v = check_stewart(1, 10000);
    CHECK(v.pass);
    CHECK(v.trials == 10000);
    CHECK(v.worst_slack >= -1e-9);
    CHECK(std::abs(replay_geometry(v) - v.worst_slack) <= 1e-12);
}

TEST_CASE("cosh convexity") {
    const HPoint x = HPoint::along_axis(2, 1, 1.0), y = HPoint::along_axis(2, 2, 1.0);
    CHECK(cosh_convexity_slack(x, y, HPoint::origin(2), 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cosh_convexity_slack(x, y, HPoint::origin(2), 0.5) > 0.0);
    const PropertyVerdict v = check_cosh_convexity(2, 10000);
    CHECK(v.pass);
    CHECK(std::abs(replay_geometry(v) - v.worst_slack) <= 1e-12);
    CHECK(check_cosh_convexity(2, 500).to_json() == check_cosh_convexity(2, 500).to_json());
}

TEST_CASE("firm nonspreading") {
    const HPoint x = HPoint::along_axis(2, 1, 2.7);
    const HPoint z = HPoint::along_axis(2, 1, 2.0);
    CHECK(firm_slack(x, z, x, z) == doctest::Approx(0.0).epsilon(1e-15));

    SolverOptions opts;
    opts.grid_spacing = 0.1;
    const PropertyVerdict zero = check_firmly_nonspreading(Bifunction(), ball2(), 3, 50, opts);
    CHECK(zero.pass);
    CHECK(zero.inconclusive == 0);
    CHECK(zero.worst_slack >= -1e-9);

    const PropertyVerdict cs = check_firmly_nonspreading(make_optimization_bifunction(cosh_sum()), ball2(), 4, 30, opts);
    CHECK(cs.pass);
    CHECK(cs.worst_slack >= -1e-6);
}

TEST_CASE("both resolvent inequality forms") {
    SolverOptions opts;
    opts.grid_spacing = 0.1;
    const ConvexRegion K = ball2();
    const PointGrid grid = build_grid(K, 0.1, 6.0);
    const HPoint x = HPoint::along_axis(2, 2, 2.4);

    const PropertyVerdict zero = check_resolvent_forms(Bifunction(), K, x, grid, opts, 1e-5);
    CHECK(zero.pass);

    const Bifunction f = regularized();
    const ResolventOutcome r = resolve(f, K, x, opts);
    const PropertyVerdict v = resolvent_forms_at(f, x, r.z, grid, 1e-5);
    CHECK(v.pass);
    for (const HPoint& y : grid.points()) {
        const double form1 = cosh_dist(x, y) - cosh_dist(x, r.z) - f(y, r.z);
        const double form2 = f(r.z, y) + cosh_dist(x, y) - cosh_dist(x, r.z);
        CHECK(form1 >= form2 - 1e-12);
    }
    // antisymmetric: identical forms
    const Bifunction g = make_optimization_bifunction(cosh_sum());
    const HPoint zg = resolve(g, K, x, opts).z;
    for (std::size_t i = 0; i < grid.size(); i += 11) {
        const HPoint& y = grid[i];
        CHECK((cosh_dist(x, y) - cosh_dist(x, zg) - g(y, zg)) ==
              doctest::Approx(g(zg, y) + cosh_dist(x, y) - cosh_dist(x, zg)).epsilon(1e-12));
    }
}

TEST_CASE("kkm") {
    const Bifunction f = make_optimization_bifunction(cosh_sum());
    const HPoint x = HPoint::along_axis(2, 1, -1.0);
    const ConvexRegion C = ball2();
    CHECK(check_kkm(f, x, C, 1, 5, 1, 0.1).pass);
    CHECK(check_kkm(f, x, C, 2, 6, 4, 0.1).pass);
    const PropertyVerdict v = check_kkm(regularized(), x, C, 8, 7, 3, 0.1);
    CHECK(v.pass);
    CHECK(v.trials == 3);
}

TEST_CASE("parallel_for and thread-count independence") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                        if (i == 3) throw InputError("boom");
                    }),
                    InputError);

    SolverOptions opts;
    opts.grid_spacing = 0.1;
    setenv("HYPEQUIL_THREADS", "1", 1);
    CHECK(harness_threads() == 1);
    const std::string a = check_firmly_nonspreading(regularized(), ball2(), 8, 12, opts).to_json().dump();
    const std::string s1 = check_stewart(8, 2000).to_json().dump();
    setenv("HYPEQUIL_THREADS", "4", 1);
    CHECK(harness_threads() == 4);
    const std::string b = check_firmly_nonspreading(regularized(), ball2(), 8, 12, opts).to_json().dump();
    CHECK(a == b);
    CHECK(s1 == check_stewart(8, 2000).to_json().dump());
    unsetenv("HYPEQUIL_THREADS");
    CHECK(harness_threads() >= 1);
}

TEST_CASE("catalog") {
    const std::vector<CatalogEntry> cat = default_catalog();
    REQUIRE(cat.size() == 5);
    for (const CatalogEntry& e : cat) {
        CHECK(check_conditions(e.f, e.K, 1, 200).all_pass());
        if (e.equilibrium) {
            CHECK(contains(e.K, *e.equilibrium, 1e-9));
            const PointGrid grid = build_grid(e.K, 0.2, 6.0);
            CHECK(equilibrium_residual(e.f, e.K, *e.equilibrium, grid) >= -1e-9);
        }
    }
}
