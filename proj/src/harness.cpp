#include "hypequil/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "hypequil/random.hpp"

namespace hypequil {

json PropertyVerdict::to_json() const {
    json out{{"property", name},       {"trials", trials}, {"inconclusive", inconclusive},
             {"worst_slack", worst_slack}, {"tolerance", tolerance}, {"witness", witness},
             {"pass", pass}};
    if (!note.empty()) out["note"] = note;
    return out;
}

std::size_t harness_threads() {
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("HYPEQUIL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<std::size_t>(v);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(harness_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

struct Trial {
    double slack = 0.0;
    json witness;
    bool inconclusive = false;
};

// Min-reduction in trial order; the lowest trial index wins ties.
PropertyVerdict reduce(std::string name, double tolerance, const std::vector<Trial>& trials) {
    PropertyVerdict v;
    v.name = std::move(name);
    v.tolerance = tolerance;
    v.trials = trials.size();
    bool any = false;
    for (const Trial& t : trials) {
        if (t.inconclusive) {
            ++v.inconclusive;
            continue;
        }
        if (!any || t.slack < v.worst_slack) {
            v.worst_slack = t.slack;
            v.witness = t.witness;
            any = true;
        }
    }
    v.pass = any && v.worst_slack >= -tolerance &&
             static_cast<double>(v.inconclusive) <= 0.01 * static_cast<double>(v.trials);
    if (!any) v.note = "no conclusive trials";
    return v;
}

std::vector<double> cosh_to(const HPoint& x, const PointGrid& Y) {
    std::vector<double> c(Y.size());
    kernels::cosh_dists(x, Y.cloud(), c);
    return c;
}

json points_json(const std::vector<HPoint>& pts) {
    json a = json::array();
    for (const HPoint& p : pts) a.push_back(point_to_json(p));
    return a;
}

double bounded_radius(const ConvexRegion& K) { return std::min(K.extent(), 6.0); }

}  // namespace

// ---------------------------------------------------------------------------
// geometry

double stewart_slack(const HPoint& x, const HPoint& y, const HPoint& z, double t) {
    const double d = dist(x, y);
    const double lhs = cosh_dist(geodesic_point(x, y, t), z) * std::sinh(d);
    const double rhs = cosh_dist(x, z) * std::sinh(t * d) + cosh_dist(y, z) * std::sinh((1.0 - t) * d);
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -std::abs(lhs - rhs) / rhs;
}

double cosh_convexity_slack(const HPoint& x, const HPoint& y, const HPoint& z, double t) {
    return t * cosh_dist(x, z) + (1.0 - t) * cosh_dist(y, z) - cosh_dist(geodesic_point(x, y, t), z);
}

double firm_slack(const HPoint& x1, const HPoint& z1, const HPoint& x2, const HPoint& z2) {
    return cosh_dist(x1, z2) + cosh_dist(x2, z1) - (cosh_dist(x1, z1) + cosh_dist(x2, z2)) * cosh_dist(z1, z2);
}

namespace {

PropertyVerdict geometry_check(const std::string& name, double tolerance, std::uint64_t seed, std::size_t trials,
                               std::size_t dim,
                               double (*slack)(const HPoint&, const HPoint&, const HPoint&, double)) {
    std::vector<Trial> out(trials);
    const HPoint o = HPoint::origin(dim);
    parallel_for(trials, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const HPoint x = random_point_in_ball(rng, o, 3.0);
        const HPoint y = random_point_in_ball(rng, o, 3.0);
        const HPoint z = random_point_in_ball(rng, o, 3.0);
        const double t = rng.uniform();
        out[i].slack = slack(x, y, z, t);
        out[i].witness = json{{"x", point_to_json(x)}, {"y", point_to_json(y)}, {"z", point_to_json(z)}, {"t", t}};
    });
    return reduce(name, tolerance, out);
}

}  // namespace

PropertyVerdict check_stewart(std::uint64_t seed, std::size_t trials, std::size_t dim) {
    return geometry_check("stewart", 1e-9, seed, trials, dim, stewart_slack);
}

PropertyVerdict check_cosh_convexity(std::uint64_t seed, std::size_t trials, std::size_t dim) {
    return geometry_check("cosh-convexity", 1e-10, seed, trials, dim, cosh_convexity_slack);
}

double replay_geometry(const PropertyVerdict& v) {
    const json& w = v.witness;
    const HPoint x = point_from_json(w.at("x"), "witness.x");
    const HPoint y = point_from_json(w.at("y"), "witness.y");
    const HPoint z = point_from_json(w.at("z"), "witness.z");
    const double t = w.at("t").get<double>();
    if (v.name == "stewart") return stewart_slack(x, y, z, t);
    if (v.name == "cosh-convexity") return cosh_convexity_slack(x, y, z, t);
    throw InputError("replay_geometry: not a geometry verdict: " + v.name);
}

// ---------------------------------------------------------------------------
// solver in the loop

PropertyVerdict check_firmly_nonspreading(const Bifunction& f, const ConvexRegion& K, std::uint64_t seed,
                                          std::size_t trials, const SolverOptions& opts,
                                          const PointGrid* certificate_grid) {
    std::optional<PointGrid> own;
    if (!certificate_grid && f.optimization_objective()) {
        own.emplace(build_grid(K, opts.grid_spacing, effective_radius(K, opts)));
        certificate_grid = &*own;
    }
    const double R = bounded_radius(K) + 0.5;
    std::vector<Trial> out(trials);
    parallel_for(trials, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const HPoint x1 = random_point_in_ball(rng, K.witness(), R);
        const HPoint x2 = random_point_in_ball(rng, K.witness(), R);
        try {
            const HPoint z1 = resolve(f, K, x1, opts, certificate_grid).z;
            const HPoint z2 = resolve(f, K, x2, opts, certificate_grid).z;
            out[i].slack = firm_slack(x1, z1, x2, z2);
            out[i].witness = json{{"x1", point_to_json(x1)},
                                  {"x2", point_to_json(x2)},
                                  {"z1", point_to_json(z1)},
                                  {"z2", point_to_json(z2)}};
        } catch (const Error&) {
            out[i].inconclusive = true;
        }
    });
    return reduce("firmly-nonspreading", 1e-6, out);
}

PropertyVerdict resolvent_forms_at(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& grid,
                           double tolerance) {
    const std::size_t n = grid.size();
    const std::vector<double> c = cosh_to(x, grid);
    const double cz = cosh_dist(x, z);
    std::vector<double> row(n), col(n);
    f.eval_row(z, grid, row);
    f.eval_col(grid, z, col);
    Trial worst;
    worst.slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double form1 = c[i] - cz - col[i];
        const double form2 = row[i] + c[i] - cz;
        if (form1 < worst.slack) {
            worst.slack = form1;
            worst.witness = json{{"form", 1}, {"y", point_to_json(grid[i])}};
        }
        if (form2 < worst.slack) {
            worst.slack = form2;
            worst.witness = json{{"form", 2}, {"y", point_to_json(grid[i])}};
        }
    }
    worst.witness["x"] = point_to_json(x);
    worst.witness["z"] = point_to_json(z);
    return reduce("resolvent-forms", tolerance, {worst});
}

PropertyVerdict check_resolvent_forms(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const PointGrid& grid,
                              const SolverOptions& opts, std::optional<double> tolerance) {
    const HPoint z = resolve(f, K, x, opts, f.optimization_objective() ? &grid : nullptr).z;
    return resolvent_forms_at(f, x, z, grid, tolerance.value_or(opts.tol));
}

PropertyVerdict check_kkm(const Bifunction& f, const HPoint& x, const ConvexRegion& C, std::size_t family_size,
                          std::uint64_t seed, std::size_t families, double spacing) {
    if (family_size == 0) throw InputError("check_kkm: family_size must be >= 1");
    const double R = bounded_radius(C);
    const PointGrid grid = build_grid(C, spacing, R);
    const std::vector<double> cgrid = cosh_to(x, grid);
    std::vector<Trial> out(families);
    parallel_for(families, [&](std::size_t k) {
        Rng rng = Rng::stream(seed, k);
        const std::size_t m = family_size - (k % family_size);
        const std::vector<HPoint> ys = sample(C, rng.next_u64(), m, R);
        std::vector<double> cy(m);
        for (std::size_t i = 0; i < m; ++i) cy[i] = cosh_dist(x, ys[i]);

        // (a) hull coverage
        const std::vector<HPoint> hull = convex_hull_samples(ys, 3, 16, rng.next_u64());
        double cover = std::numeric_limits<double>::infinity();
        std::size_t cover_at = 0;
        for (std::size_t j = 0; j < hull.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                best = std::min(best, f(ys[i], hull[j]) + cosh_dist(x, hull[j]) - cy[i]);
            }
            const double s = 1e-8 - best;
            if (s < cover) {
                cover = s;
                cover_at = j;
            }
        }

        // (b) common point on the grid
        std::vector<double> M(grid.size(), -std::numeric_limits<double>::infinity());
        std::vector<double> row(grid.size());
        for (std::size_t i = 0; i < m; ++i) {
            f.eval_row(ys[i], grid, row);
            for (std::size_t j = 0; j < grid.size(); ++j) M[j] = std::max(M[j], row[j] + cgrid[j] - cy[i]);
        }
        const auto it = std::min_element(M.begin(), M.end());
        const double allow = grid_lipschitz(M, grid) * spacing;
        const double inter = allow - *it;

        Trial& t = out[k];
        t.witness = json{{"x", point_to_json(x)}, {"family", points_json(ys)}};
        if (cover <= inter) {
            t.slack = cover;
            t.witness["part"] = "coverage";
            t.witness["u"] = point_to_json(hull[cover_at]);
        } else {
            t.slack = inter;
            t.witness["part"] = "intersection";
            t.witness["u"] = point_to_json(grid[static_cast<std::size_t>(it - M.begin())]);
            t.witness["allowance"] = allow;
        }
    });
    return reduce("kkm", 0.0, out);
}

// ---------------------------------------------------------------------------
// catalog and suite

std::vector<CatalogEntry> default_catalog() {
    const std::size_t n = 2;
    const ConvexRegion K = ConvexRegion::ball(HPoint::origin(n), 2.0);
    const HPoint a1 = HPoint::along_axis(n, 1, 0.8);
    const HPoint a2 = HPoint::along_axis(n, 2, 1.2);
    const Objective cosh_sum = Objective::sum({Term{Term::Kind::cosh_dist, 1.0, a1}, Term{Term::Kind::cosh_dist, 0.5, a2}});
    // argmin of a cosh sum: normalize(sum w_i a_i)
    const HPoint cosh_min = project_to_hyperboloid(a1.coords() + 0.5 * a2.coords());

    const HPoint d_anchor = geodesic_point(HPoint::along_axis(n, 1, -0.7), HPoint::along_axis(n, 2, -0.7), 0.5);
    const Objective distance = Objective::sum({Term{Term::Kind::dist, 1.0, d_anchor}});

    const HPoint b1 = HPoint::along_axis(n, 1, 0.9);
    const HPoint b2 = HPoint::along_axis(n, 1, -0.9);
    const Objective max_cosh({Piece{{Term{Term::Kind::cosh_dist, 1.0, b1}}, 0.0},
                              Piece{{Term{Term::Kind::cosh_dist, 1.0, b2}}, 0.0}});

    // W = 1.5 >= mu cosh(diam K) keeps f(x,.) convex on K.
    const double mu = 0.5 * 1.5 / std::cosh(4.0);

    std::vector<CatalogEntry> out;
    out.push_back({"zero", Bifunction(), K, HPoint::origin(n), false});
    out.push_back({"cosh-sum", make_optimization_bifunction(cosh_sum), K, cosh_min, true});
    out.push_back({"distance", make_optimization_bifunction(distance), K, d_anchor, true});
    out.push_back({"max-cosh", make_optimization_bifunction(max_cosh), K, HPoint::origin(n), true});
    out.push_back({"regularized-diff", Bifunction(RegularizedDiff{cosh_sum, mu}), K, cosh_min, true});
    return out;
}

InstanceVerdicts check_resolvent_instances(const CatalogEntry& e, std::uint64_t seed, std::size_t instances,
                                           const SolverOptions& opts) {
    const double s = opts.grid_spacing;
    const PointGrid grid = build_grid(e.K, s, effective_radius(e.K, opts));
    const std::optional<Objective> g = e.f.optimization_objective();
    const double R = bounded_radius(e.K) + 0.5;

    std::vector<Trial> agree(instances), single(instances), forms(instances);
    parallel_for(instances, [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const HPoint x = random_point_in_ball(rng, e.K.witness(), R);
        try {
            const HPoint zo = oracle_resolve(e.f, e.K, x, grid);
            SolverOptions o1 = opts;
            o1.seed = seed + 2 * i;
            const HPoint zg = resolve_general(e.f, e.K, x, o1).z;
            Trial& a = agree[i];
            a.slack = 2.0 * s - dist(zg, zo);
            a.witness = json{{"x", point_to_json(x)}, {"oracle", point_to_json(zo)}, {"general", point_to_json(zg)}};
            std::optional<HPoint> zd;
            if (g) {
                zd = resolve_optimization(*g, e.K, x, opts, &grid).z;
                const double sd = s - dist(*zd, zo);
                if (sd < a.slack) {
                    a.slack = sd;
                    a.witness["descent"] = point_to_json(*zd);
                }
            }

            SolverOptions o2 = opts;
            o2.seed = seed + 2 * i + 1;
            const HPoint zg2 = resolve_general(e.f, e.K, x, o2).z;
            single[i].slack = s - dist(zg, zg2);
            single[i].witness = json{{"x", point_to_json(x)}, {"first", point_to_json(zg)}, {"second", point_to_json(zg2)}};

            PropertyVerdict v = resolvent_forms_at(e.f, x, zg, grid, 1e-5);
            if (zd) {
                PropertyVerdict vd = resolvent_forms_at(e.f, x, *zd, grid, 1e-5);
                if (vd.worst_slack < v.worst_slack) v = vd;
            }
            forms[i].slack = v.worst_slack;
            forms[i].witness = v.witness;
        } catch (const Error&) {
            agree[i].inconclusive = single[i].inconclusive = forms[i].inconclusive = true;
        }
    });
    return {reduce(e.name + "/solver-oracle", 0.0, agree), reduce(e.name + "/single-valued", 0.0, single),
            reduce(e.name + "/resolvent-forms", 1e-5, forms)};
}

PropertyVerdict check_conditions_verdict(const CatalogEntry& e, std::uint64_t seed, std::size_t samples) {
    const ConditionReport rep = check_conditions(e.f, e.K, seed, samples);
    std::vector<Trial> clauses;
    for (const ClauseResult& c : rep.clauses) {
        Trial t;
        t.slack = c.tolerance - c.worst;
        t.witness = json{{"clause", c.name}, {"points", points_json(c.witness)}};
        clauses.push_back(std::move(t));
    }
    PropertyVerdict v = reduce(e.name + "/conditions", 0.0, clauses);
    v.trials = rep.samples;
    return v;
}

PropertyVerdict check_fixed_point(const CatalogEntry& e, const SolverOptions& opts) {
    if (!e.equilibrium) throw InputError("check_fixed_point: entry has no known equilibrium");
    const HPoint& p = *e.equilibrium;
    const PointGrid grid = build_grid(e.K, opts.grid_spacing, effective_radius(e.K, opts));
    Trial t;
    try {
        const HPoint z = resolve(e.f, e.K, p, opts, &grid).z;
        const double moved = 1e-6 - dist(z, p);
        const double resid = 1e-5 + equilibrium_residual(e.f, e.K, z, grid);
        t.slack = std::min(moved, resid);
        t.witness = json{{"p", point_to_json(p)}, {"z", point_to_json(z)}, {"part", moved <= resid ? "distance" : "residual"}};
    } catch (const Error&) {
        t.inconclusive = true;
    }
    return reduce(e.name + "/fixed-point", 0.0, {t});
}

PropertyVerdict check_ppa(const CatalogEntry& e, std::uint64_t seed, std::size_t max_steps,
                          const SolverOptions& opts) {
    if (!e.equilibrium) throw InputError("check_ppa: entry has no known equilibrium");
    const HPoint& p = *e.equilibrium;
    Rng rng = Rng::stream(seed, 0);
    const HPoint x0 = random_point_in_ball(rng, e.K.witness(), 0.9 * bounded_radius(e.K));
    const IterTrace tr = run_ppa(e.f, e.K, x0, LambdaSchedule{}, 1e-12, max_steps, opts);
    Trial t;
    if (tr.status == TraceStatus::solver_error) {
        t.inconclusive = true;
        return reduce(e.name + "/ppa", 0.0, {t});
    }
    double prev = dist(x0, p);
    double fejer = std::numeric_limits<double>::infinity();
    std::size_t fejer_at = 0;
    double closest = prev;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double d = dist(tr.iterates[k], p);
        const double s = 1e-6 - (d - prev);
        if (s < fejer) {
            fejer = s;
            fejer_at = k + 1;
        }
        closest = std::min(closest, d);
        prev = d;
    }
    const double conv = 1e-4 - closest;
    t.slack = std::min(fejer, conv);
    t.witness = json{{"x0", point_to_json(x0)},
                     {"p", point_to_json(p)},
                     {"steps", tr.size()},
                     {"closest", closest},
                     {"part", fejer <= conv ? "fejer" : "convergence"},
                     {"fejer_step", fejer_at}};
    PropertyVerdict v = reduce(e.name + "/ppa", 0.0, {t});
    v.trials = tr.size();
    // d < 1e-4 is strict
    if (conv <= 0.0) v.pass = false;
    return v;
}

std::vector<PropertyVerdict> run_suite(const std::vector<CatalogEntry>& entries, const SuiteOptions& opts) {
    std::vector<PropertyVerdict> out;
    out.push_back(check_stewart(opts.seed, opts.geometry_trials));
    out.push_back(check_cosh_convexity(opts.seed + 1, opts.geometry_trials));
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const CatalogEntry& e = entries[k];
        const std::uint64_t s = opts.seed * 1000003 + 101 * (k + 1);
        out.push_back(check_conditions_verdict(e, s, opts.condition_samples));
        InstanceVerdicts iv = check_resolvent_instances(e, s + 1, opts.instances, opts.solver);
        out.push_back(std::move(iv.agreement));
        out.push_back(std::move(iv.single_valued));
        out.push_back(std::move(iv.resolvent_forms));
        PropertyVerdict firm = check_firmly_nonspreading(e.f, e.K, s + 2, opts.firm_pairs, opts.solver);
        firm.name = e.name + "/" + firm.name;
        out.push_back(std::move(firm));
        if (e.equilibrium) out.push_back(check_fixed_point(e, opts.solver));
        Rng rng = Rng::stream(s + 3, 0);
        const HPoint x = random_point_in_ball(rng, e.K.witness(), bounded_radius(e.K) + 0.5);
        PropertyVerdict kkm = check_kkm(e.f, x, e.K, opts.kkm_family_size, s + 4, opts.kkm_families);
        kkm.name = e.name + "/" + kkm.name;
        out.push_back(std::move(kkm));
        if (e.equilibrium && e.unique_equilibrium) out.push_back(check_ppa(e, s + 5, opts.ppa_steps, opts.solver));
    }
    return out;
}

}  // namespace hypequil
