#pragma once

// The resolvent L_f x: the unique z in K with
//     f(z,y) + cosh d(x,y) - cosh d(x,z) >= 0   for every y in K.
// Three solvers: Riemannian descent for f(x,y) = g(y) - g(x), a
// multi-resolution merit search for general monotone f, and an exhaustive
// max-min oracle over a fixed grid.

#include <cstdint>
#include <string>

#include "hypequil/bifunction.hpp"
#include "hypequil/region.hpp"

namespace hypequil {

struct SolverOptions {
    double tol = 1e-8;
    std::size_t max_iters = 10000;
    double grid_spacing = 0.05;
    double bounding_radius = 6.0;
    std::uint64_t seed = 0;

    /// Throws InputError naming the first invalid field.
    void validate() const;
};

enum class SolverKind { descent, merit_grid, oracle };

std::string to_string(SolverKind k);

struct ResolventOutcome {
    HPoint z;
    /// Merit over the certification grid (<= tol + C * spacing on success).
    double merit;
    std::size_t iterations;
    SolverKind solver;
    /// Certification slack C * spacing that was allowed on top of tol.
    double grid_slack = 0.0;

    json to_json() const;
};

/// max_{y in Y} -(f(z,y) + cosh d(x,y) - cosh d(x,z)). Throws InputError on an empty grid.
double merit(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& Y);

/// Observed Lipschitz bound of y -> f(z,y) + cosh d(x,y) on the grid: up to 64
/// anchor points, each compared with every grid point within 2 * spacing.
double merit_lipschitz(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& Y);

/// Largest |v_j - v_a| / d(p_j, p_a) over up to 64 evenly strided anchors a
/// and all grid points j with 0 < d <= 2 * spacing.
double grid_lipschitz(std::span<const double> values, const PointGrid& grid);

/// Effective radius of the grids the solvers build: min(bounding_radius, region extent).
double effective_radius(const ConvexRegion& K, const SolverOptions& opts);

/// argmin_{z in K} g(z) + cosh d(x,z) by projected descent, certified on a grid
/// of spacing opts.grid_spacing. `certificate_grid` (optional) replaces the
/// freshly built one. Throws ConvergenceError / NoCertificateError.
ResolventOutcome resolve_optimization(const Objective& g, const ConvexRegion& K, const HPoint& x,
                                      const SolverOptions& opts, const PointGrid* certificate_grid = nullptr);

/// Multi-resolution merit search over K ∩ B(witness, bounding_radius), followed
/// by a polish step (fixed-point iteration z <- argmin_y f(z,y) + cosh d(x,y))
/// when y -> f(z,y) has a closed form. Grid phase comes from opts.seed.
/// Throws NoCertificateError when the final merit exceeds tol + C * spacing.
ResolventOutcome resolve_general(const Bifunction& f, const ConvexRegion& K, const HPoint& x,
                                 const SolverOptions& opts);

/// Descent solver when f is optimization-type, the general solver otherwise.
ResolventOutcome resolve(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const SolverOptions& opts,
                         const PointGrid* certificate_grid = nullptr);

struct OracleResult {
    std::size_t index;
    /// min_y f(z,y) + cosh d(x,y) - cosh d(x,z) at the returned grid point.
    double value;
};

/// Exhaustive max-min over the grid (lowest index on ties). Exact; rows are
/// pruned once they can no longer beat the incumbent.
OracleResult oracle_search(const Bifunction& f, const HPoint& x, const PointGrid& grid);

/// The grid point returned by oracle_search.
HPoint oracle_resolve(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const PointGrid& grid);

/// merit(f, x, z, grid) for every grid point z (row order); the full table
/// behind the oracle.
std::vector<double> merit_table(const Bifunction& f, const HPoint& x, const PointGrid& grid);

/// t / sinh t, with the series 1 - t^2/6 + 7 t^4/360 below 1e-4.
double rho(double t);

/// f(z,w) + rho(d(z,w)) (cosh d(x,w) - cosh d(x,z) cosh d(z,w)); >= 0 for all w
/// in K exactly when z = L_f x.
double characterization_residual(const Bifunction& f, const HPoint& x, const HPoint& z, const HPoint& w);

}  // namespace hypequil
