#include "hypequil/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypequil/descent.hpp"
#include "hypequil/random.hpp"
#include "hypequil/solver_error.hpp"

namespace hypequil {

void SolverOptions::validate() const {
    if (!(tol > 0.0)) throw InputError("solver.tol must be positive");
    if (max_iters == 0) throw InputError("solver.max_iters must be positive");
    if (!(grid_spacing > 0.0)) throw InputError("solver.grid_spacing must be positive");
    if (!(bounding_radius > 0.0)) throw InputError("solver.bounding_radius must be positive");
}

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::descent:
            return "descent";
        case SolverKind::merit_grid:
            return "merit-grid";
        case SolverKind::oracle:
            return "oracle";
    }
    return "?";
}

json ResolventOutcome::to_json() const {
    return json{{"z", point_to_json(z)}, {"merit", merit}, {"iterations", iterations}, {"solver", to_string(solver)}};
}

namespace {

// h(z, y_i) = f(z,y_i) + c_i - cosh d(x,z), with c_i = cosh d(x, y_i) precomputed.
void h_row(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& Y, std::span<const double> c,
           std::span<double> out) {
    f.eval_row(z, Y, out);
    const double cz = cosh_dist(x, z);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] - cz;
}

std::vector<double> cosh_to(const HPoint& x, const PointGrid& Y) {
    std::vector<double> c(Y.size());
    kernels::cosh_dists(x, Y.cloud(), c);
    return c;
}

}  // namespace

double merit(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& Y) {
    if (Y.empty()) throw InputError("merit: empty grid");
    const std::vector<double> c = cosh_to(x, Y);
    std::vector<double> h(Y.size());
    h_row(f, x, z, Y, c, h);
    return -*std::min_element(h.begin(), h.end());
}

double grid_lipschitz(std::span<const double> values, const PointGrid& Y) {
    const std::size_t n = Y.size();
    if (values.size() != n) throw InputError("grid_lipschitz: size mismatch");
    if (n < 2) return 0.0;
    const std::size_t anchors = std::min<std::size_t>(64, n);
    const std::size_t stride = n / anchors;
    const double reach = 2.0 * Y.spacing();
    std::vector<double> d(n);
    double lip = 0.0;
    for (std::size_t a = 0; a < anchors; ++a) {
        const std::size_t ia = a * stride;
        kernels::dists(Y[ia], Y.cloud(), d);
        for (std::size_t j = 0; j < n; ++j) {
            if (d[j] > 1e-12 && d[j] <= reach) lip = std::max(lip, std::abs(values[j] - values[ia]) / d[j]);
        }
    }
    return lip;
}

double merit_lipschitz(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& Y) {
    std::vector<double> phi(Y.size());
    f.eval_row(z, Y, phi);
    const std::vector<double> c = cosh_to(x, Y);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += c[i];
    return grid_lipschitz(phi, Y);
}

double effective_radius(const ConvexRegion& K, const SolverOptions& opts) {
    const double r = std::min(opts.bounding_radius, K.extent());
    if (!std::isfinite(r)) throw InputError("resolvent: bounded domain required (set solver.bounding_radius)");
    return r;
}

// ---------------------------------------------------------------------------
// oracle

namespace {

constexpr std::size_t kChunk = 256;

struct ChunkedGrid {
    std::vector<PointGrid> chunks;
    std::vector<std::vector<double>> c;  // cosh d(x, y) per chunk
};

// Splits Y into chunks with the entries of `order` first. The min over a row
// does not depend on this order; it only makes pruning bite early.
ChunkedGrid chunk(const PointGrid& Y, const HPoint& x, const std::vector<std::size_t>& order) {
    ChunkedGrid out;
    for (std::size_t b = 0; b < order.size(); b += kChunk) {
        std::vector<HPoint> pts;
        const std::size_t e = std::min(order.size(), b + kChunk);
        for (std::size_t k = b; k < e; ++k) pts.push_back(Y[order[k]]);
        out.chunks.emplace_back(std::move(pts), Y.spacing());
        out.c.push_back(cosh_to(x, out.chunks.back()));
    }
    return out;
}

// min over the chunked grid of h(z, .), abandoning once the running min
// satisfies `stop`.
template <class Stop>
double row_min(const Bifunction& f, const HPoint& x, const HPoint& z, const ChunkedGrid& cg, Stop stop) {
    double m = std::numeric_limits<double>::infinity();
    std::vector<double> h(kChunk);
    for (std::size_t k = 0; k < cg.chunks.size(); ++k) {
        std::span<double> row(h.data(), cg.chunks[k].size());
        h_row(f, x, z, cg.chunks[k], cg.c[k], row);
        for (double v : row) m = std::min(m, v);
        if (stop(m)) break;
    }
    return m;
}

// Max-min of h over candidates x Y; `hint` is a candidate index evaluated first.
OracleResult maximin(const Bifunction& f, const HPoint& x, const PointGrid& cands, const PointGrid& Y,
                     std::size_t hint) {
    if (cands.empty() || Y.empty()) throw InputError("oracle: empty grid");
    const std::vector<double> cY = cosh_to(x, Y);
    std::vector<double> row(Y.size());

    // A few greedy hops z <- nearest candidate to argmin_y h(z,y) give a good
    // incumbent and a Y order that prunes most rows after one chunk.
    std::size_t best = hint;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> order_key;
    std::size_t cur = hint;
    for (int hop = 0; hop < 6; ++hop) {
        h_row(f, x, cands[cur], Y, cY, row);
        const auto it = std::min_element(row.begin(), row.end());
        const double v = *it;
        if (v > best_val || (v == best_val && cur < best)) {
            best_val = v;
            best = cur;
            order_key = row;
        }
        const std::size_t next = cands.nearest(Y[static_cast<std::size_t>(it - row.begin())]);
        if (next == cur) break;
        cur = next;
    }
    if (order_key.empty()) order_key = row;
    std::vector<std::size_t> order(Y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return order_key[a] < order_key[b]; });
    const ChunkedGrid cg = chunk(Y, x, order);

    // Exact values are needed for every row that survives pruning; rows already
    // evaluated during the hops are recomputed here so ties resolve by index.
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (i == best) continue;
        const bool lower = i < best;
        const double incumbent = best_val;
        const double m = row_min(f, x, cands[i], cg, [&](double v) { return lower ? v < incumbent : v <= incumbent; });
        if (m > best_val || (m == best_val && lower)) {
            best_val = m;
            best = i;
        }
    }
    return {best, best_val};
}

}  // namespace

OracleResult oracle_search(const Bifunction& f, const HPoint& x, const PointGrid& grid) {
    if (grid.empty()) throw InputError("oracle: empty grid");
    return maximin(f, x, grid, grid, grid.nearest(x));
}

HPoint oracle_resolve(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const PointGrid& grid) {
    if (grid.empty()) throw InputError("oracle: empty grid");
    return grid[maximin(f, x, grid, grid, grid.nearest(project(K, x))).index];
}

std::vector<double> merit_table(const Bifunction& f, const HPoint& x, const PointGrid& grid) {
    if (grid.empty()) throw InputError("merit_table: empty grid");
    const std::vector<double> c = cosh_to(x, grid);
    std::vector<double> row(grid.size());
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        h_row(f, x, grid[i], grid, c, row);
        out[i] = -*std::min_element(row.begin(), row.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// solvers

ResolventOutcome resolve_optimization(const Objective& g, const ConvexRegion& K, const HPoint& x,
                                      const SolverOptions& opts, const PointGrid* certificate_grid) {
    opts.validate();
    if (x.dim() != K.dim()) throw InputError("resolve_optimization: dimension mismatch");
    const Objective F = g.plus(Term{Term::Kind::cosh_dist, 1.0, x});
    DescentOptions dopt;
    dopt.tol = opts.tol;
    dopt.max_iters = opts.max_iters;
    const DescentResult res = minimize(F, K, project(K, x), dopt);

    std::optional<PointGrid> own;
    if (!certificate_grid) own.emplace(build_grid(K, opts.grid_spacing, effective_radius(K, opts)));
    const PointGrid& grid = certificate_grid ? *certificate_grid : *own;
    const Bifunction f(ObjectiveDiff{g});
    const double m = merit(f, x, res.z, grid);
    const double slack = merit_lipschitz(f, x, res.z, grid) * grid.spacing();
    if (m > opts.tol + slack) {
        throw NoCertificateError("resolve_optimization: merit " + format_double(m) + " exceeds tol + slack", res.z,
                                 m);
    }
    return {res.z, m, res.iterations, SolverKind::descent, slack};
}

ResolventOutcome resolve_general(const Bifunction& f, const ConvexRegion& K, const HPoint& x,
                                 const SolverOptions& opts) {
    opts.validate();
    if (x.dim() != K.dim()) throw InputError("resolve_general: dimension mismatch");
    const double R = effective_radius(K, opts);
    const double s_final = opts.grid_spacing;
    std::size_t levels = 0;
    while (levels < 8 && s_final * std::ldexp(1.0, static_cast<int>(levels) + 1) <= R / 8.0) ++levels;
    const double s0 = s_final * std::ldexp(1.0, static_cast<int>(levels));
    Rng rng = Rng::stream(opts.seed, 0x9e50);
    const double phase = rng.uniform();

    const PointGrid coarse = build_grid(K, s0, R, phase);
    HPoint z = coarse[maximin(f, x, coarse, coarse, coarse.nearest(project(K, x))).index];
    double s_prev = s0;
    for (std::size_t k = 1; k <= levels; ++k) {
        const double s = s0 * std::ldexp(1.0, -static_cast<int>(k));
        const PointGrid local = build_grid_around(K, z, s, 3.0 * s_prev, phase);
        const PointGrid Y = local.merged_with(coarse);
        z = local[maximin(f, x, local, Y, local.nearest(z)).index];
        s_prev = s;
    }
    const PointGrid fine = levels == 0 ? coarse : build_grid(K, s_final, R, phase);
    double m = merit(f, x, z, fine);
    std::size_t iterations = levels + 1;

    // Polish.
    HPoint zp = z;
    bool converged = false;
    for (std::size_t it = 0; it < 200; ++it) {
        const std::optional<Objective> second = f.second_slot_objective(zp);
        if (!second) break;
        DescentOptions dopt;
        dopt.tol = opts.tol;
        dopt.max_iters = opts.max_iters;
        HPoint next = zp;
        try {
            next = minimize(second->plus(Term{Term::Kind::cosh_dist, 1.0, x}), K, zp, dopt).z;
        } catch (const ConvergenceError&) {
            break;
        }
        const double step = dist(next, zp);
        zp = next;
        ++iterations;
        if (step < opts.tol) {
            converged = true;
            break;
        }
    }
    if (converged && dist(zp, z) <= 2.0 * s_final) {
        const double mp = merit(f, x, zp, fine);
        if (mp <= m) {
            z = zp;
            m = mp;
        }
    }

    const double slack = merit_lipschitz(f, x, z, fine) * fine.spacing();
    if (m > opts.tol + slack) {
        throw NoCertificateError("resolve_general: merit " + format_double(m) + " exceeds tol + slack " +
                                     format_double(slack),
                                 z, m);
    }
    return {z, m, iterations, SolverKind::merit_grid, slack};
}

ResolventOutcome resolve(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const SolverOptions& opts,
                         const PointGrid* certificate_grid) {
    if (const std::optional<Objective> g = f.optimization_objective()) {
        return resolve_optimization(*g, K, x, opts, certificate_grid);
    }
    return resolve_general(f, K, x, opts);
}

double rho(double t) {
    if (t < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
    }
    return t / std::sinh(t);
}

double characterization_residual(const Bifunction& f, const HPoint& x, const HPoint& z, const HPoint& w) {
    const double czw = cosh_dist(z, w);
    return f(z, w) + rho(dist(z, w)) * (cosh_dist(x, w) - cosh_dist(x, z) * czw);
}

}  // namespace hypequil
