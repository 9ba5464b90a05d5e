#include "hypequil/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypequil/solver_error.hpp"

namespace hypequil {

namespace {

double tnorm(const Vec& v) { return std::sqrt(std::max(0.0, minkowski_form_unchecked(v, v))); }

// Solves the (k+1)x(k+1) bordered KKT system of min |sum l_i g_i|^2 on the
// affine hull of the subset. Returns false when singular.
bool solve_bordered(std::vector<std::vector<double>> a, std::vector<double>& x) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-14) return false;
        std::swap(a[piv], a[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return true;
}

// min |sum a_i g_i + sum l_j n_j| over a in the simplex, l >= 0, by enumerating
// supports (the generator count is small). `cone` vectors carry no sum constraint.
Vec min_norm_enumerate(const std::vector<Vec>& gens, const std::vector<Vec>& cone) {
    const std::size_t mg = gens.size();
    const std::size_t m = mg + cone.size();
    auto vec = [&](std::size_t i) -> const Vec& { return i < mg ? gens[i] : cone[i - mg]; };
    std::vector<std::vector<double>> gram(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) gram[i][j] = minkowski_form_unchecked(vec(i), vec(j));
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, gram[i][i]);
    if (scale == 0.0) return gens.front();

    Vec best = gens.front();
    double best_norm2 = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx;
    std::vector<double> sol;
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        if ((mask & ((std::size_t{1} << mg) - 1)) == 0) continue;
        idx.clear();
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) idx.push_back(i);
        }
        const std::size_t k = idx.size();
        // [G 1_g; 1_g^T 0] [coef; -mu] = [0; 1], 1_g marking simplex generators.
        std::vector<std::vector<double>> sys(k + 1, std::vector<double>(k + 2, 0.0));
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) sys[r][c] = gram[idx[r]][idx[c]] / scale;
            const double in_simplex = idx[r] < mg ? 1.0 : 0.0;
            sys[r][k] = in_simplex;
            sys[k][r] = in_simplex;
        }
        sys[k][k + 1] = 1.0;
        if (!solve_bordered(sys, sol)) continue;
        bool feasible = true;
        double total = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            if (sol[r] < -1e-12) feasible = false;
            sol[r] = std::max(sol[r], 0.0);
            if (idx[r] < mg) total += sol[r];
        }
        if (!feasible || total <= 0.0) continue;
        Vec v(gens.front().size());
        for (std::size_t r = 0; r < k; ++r) {
            v += (idx[r] < mg ? sol[r] / total : sol[r]) * vec(idx[r]);
        }
        const double n2 = minkowski_form_unchecked(v, v);
        if (n2 < best_norm2) {
            best_norm2 = n2;
            best = v;
        }
    }
    return best;
}

// Frank-Wolfe on conv{ g_i + r_i B } for the rare mixed case.
Vec min_norm_frank_wolfe(const std::vector<PieceGradient>& gens) {
    Vec s = gens.front().smooth;
    for (int it = 0; it < 2000; ++it) {
        const double sn = tnorm(s);
        if (sn < 1e-300) return s;
        Vec best_p = s;
        double best_val = std::numeric_limits<double>::infinity();
        for (const PieceGradient& g : gens) {
            Vec p = g.smooth;
            p -= (g.kink_radius / sn) * s;
            const double val = minkowski_form_unchecked(s, p);
            if (val < best_val) {
                best_val = val;
                best_p = p;
            }
        }
        const Vec d = s - best_p;
        const double dd = minkowski_form_unchecked(d, d);
        if (dd <= 0.0) break;
        const double gamma = std::clamp(minkowski_form_unchecked(s, d) / dd, 0.0, 1.0);
        if (gamma <= 0.0) break;
        s -= gamma * d;
    }
    return s;
}

struct Direction {
    Vec v;
    std::vector<std::size_t> active;
};

Direction descent_direction(const Objective& f, const ConvexRegion& region, const HPoint& z, double eps,
                            double scale) {
    if (f.pieces().empty()) return {Vec(z.ambient_dim()), {}};
    const std::vector<double> vals = f.piece_values(z);
    const double top = *std::max_element(vals.begin(), vals.end());
    Direction dir{Vec(z.ambient_dim()), {}};
    std::vector<PieceGradient> gens;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] >= top - eps) {
            dir.active.push_back(i);
            gens.push_back(f.piece_gradient(i, z, eps));
        }
    }
    dir.v = min_norm_element(gens, active_normals(region, z, 10.0 * eps / scale));
    return dir;
}

// Largest directional derivative of the eps-active pieces at p along w.
double directional_derivative(const Objective& f, const HPoint& p, const Vec& w, double eps) {
    if (f.pieces().empty()) return 0.0;
    const std::vector<double> vals = f.piece_values(p);
    const double top = *std::max_element(vals.begin(), vals.end());
    const double wn = tnorm(w);
    double dd = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < top - eps) continue;
        const PieceGradient g = f.piece_gradient(i, p, eps);
        dd = std::max(dd, minkowski_form_unchecked(g.smooth, w) + g.kink_radius * wn);
    }
    return dd;
}

}  // namespace

Vec min_norm_element(const std::vector<PieceGradient>& gens) {
    if (gens.empty()) throw InputError("min_norm_element: no generators");
    if (gens.size() == 1 && gens.front().kink_radius > 0.0) {
        const double n = tnorm(gens.front().smooth);
        const double r = gens.front().kink_radius;
        if (n <= r) return Vec(gens.front().smooth.size());
        return (1.0 - r / n) * gens.front().smooth;
    }
    return min_norm_element(gens, {});
}

Vec min_norm_element(const std::vector<PieceGradient>& gens, const std::vector<Vec>& cone) {
    if (gens.empty()) throw InputError("min_norm_element: no generators");
    const bool polytope =
        std::all_of(gens.begin(), gens.end(), [](const PieceGradient& g) { return g.kink_radius == 0.0; });
    if (polytope && gens.size() + cone.size() <= 12) {
        std::vector<Vec> smooth;
        for (const PieceGradient& g : gens) smooth.push_back(g.smooth);
        return min_norm_enumerate(smooth, cone);
    }
    // kink balls: ignore the cone, the projection after each step handles it
    if (gens.size() == 1) return min_norm_element(gens);
    return min_norm_frank_wolfe(gens);
}

DescentResult minimize(const Objective& objective, const ConvexRegion& region, const HPoint& start,
                       const DescentOptions& opts) {
    if (!(opts.tol > 0.0)) throw InputError("descent: tol must be positive");
    HPoint z = project(region, start);
    double fz = objective.value(z);
    const double scale = 1.0 + std::abs(fz);
    double eps = 1e-3 * scale;
    const double eps_min = 1e-13 * scale;
    double residual = std::numeric_limits<double>::infinity();

    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        const Direction dir = descent_direction(objective, region, z, eps, scale);
        const double vn = tnorm(dir.v);
        const HPoint probe = project(region, exp_map_trusted(z, -1.0 * dir.v));
        residual = dist(z, probe);
        if (residual < opts.tol || vn == 0.0) {
            if (eps <= eps_min) return {z, fz, it, residual};
            eps = std::max(eps * 0.1, eps_min);
            continue;
        }
        if (residual * vn < eps && eps > eps_min) {
            eps = std::max(eps * 0.1, eps_min);
            continue;
        }

        const double roundoff = 1e-14 * (1.0 + std::abs(fz));
        bool accepted = false;
        for (double alpha = opts.initial_step; alpha > 1e-20; alpha *= opts.shrink) {
            const HPoint trial = project(region, exp_map_trusted(z, (-alpha) * dir.v));
            const double ft = objective.value(trial);
            const double predicted = minkowski_form_unchecked(dir.v, log_map(z, trial).vec());
            const double change = ft - fz;
            bool ok = change <= opts.sufficient_decrease * predicted && predicted < 0.0;
            if (!ok && std::abs(change) <= roundoff && predicted < 0.0) {
                // Function values no longer resolve the decrease; accept if the
                // step has not overshot along the path.
                const Vec onward = -1.0 * log_map(trial, z).vec();
                ok = directional_derivative(objective, trial, onward, eps) <= 0.0;
            }
            if (ok) {
                // Armijo alone happily takes an overshoot that lands at the same level.
                HPoint best = trial;
                double fbest = ft;
                for (double beta = alpha * opts.shrink; beta > 1e-20; beta *= opts.shrink) {
                    HPoint shorter = project(region, exp_map_trusted(z, (-beta) * dir.v));
                    const double fs = objective.value(shorter);
                    if (!(fs < fbest)) break;
                    best = std::move(shorter);
                    fbest = fs;
                }
                z = std::move(best);
                fz = fbest;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (eps > eps_min) {
                eps = std::max(eps * 0.1, eps_min);
                continue;
            }
            // Stalled at the limit of double precision.
            return {z, fz, it, residual};
        }
    }
    throw ConvergenceError("descent: max_iters exceeded (residual " + std::to_string(residual) + ")", z);
}

}  // namespace hypequil
