#pragma once

// Randomized, seeded property checks. Every check returns a PropertyVerdict
// whose worst_slack is the most negative margin seen (nonnegative = holds);
// it passes when worst_slack >= -tolerance.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypequil/bifunction.hpp"
#include "hypequil/ppa.hpp"
#include "hypequil/resolvent.hpp"

namespace hypequil {

struct PropertyVerdict {
    std::string name;
    std::size_t trials = 0;
    std::size_t inconclusive = 0;
    double worst_slack = 0.0;
    double tolerance = 0.0;
    /// Inputs reproducing worst_slack (points as coordinate arrays).
    json witness;
    bool pass = true;
    std::string note;

    json to_json() const;
};

/// Number of worker threads for trial loops: HYPEQUIL_THREADS if set (>= 1),
/// else the hardware concurrency.
std::size_t harness_threads();

/// Runs fn(i) for i in [0, n) on up to harness_threads() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// -|LHS - RHS| / RHS of the hyperbolic Stewart identity
///   cosh d(t x (+) (1-t) y, z) sinh d(x,y) = cosh d(x,z) sinh(t d) + cosh d(y,z) sinh((1-t) d).
double stewart_slack(const HPoint& x, const HPoint& y, const HPoint& z, double t);

/// t cosh d(x,z) + (1-t) cosh d(y,z) - cosh d(t x (+) (1-t) y, z).
double cosh_convexity_slack(const HPoint& x, const HPoint& y, const HPoint& z, double t);

/// cosh d(x1,z2) + cosh d(x2,z1) - (cosh d(x1,z1) + cosh d(x2,z2)) cosh d(z1,z2).
double firm_slack(const HPoint& x1, const HPoint& z1, const HPoint& x2, const HPoint& z2);

/// Samples x, y, z in the radius-3 ball around the origin of H^dim and t in [0,1].
PropertyVerdict check_stewart(std::uint64_t seed, std::size_t trials, std::size_t dim = 2);
PropertyVerdict check_cosh_convexity(std::uint64_t seed, std::size_t trials, std::size_t dim = 2);

/// Recomputes the slack stored in a stewart / cosh-convexity witness.
double replay_geometry(const PropertyVerdict& v);

/// z_i = L_f x_i for x_1, x_2 drawn in B(witness, extent + 0.5); solver
/// failures count as inconclusive, and more than 1% of them fails the verdict.
PropertyVerdict check_firmly_nonspreading(const Bifunction& f, const ConvexRegion& K, std::uint64_t seed,
                                          std::size_t trials, const SolverOptions& opts,
                                          const PointGrid* certificate_grid = nullptr);

/// Both inequality families of the resolvent characterization at z = L_f x
/// over the grid: cosh d(x,y) - cosh d(x,z) - f(y,z) and f(z,y) + cosh d(x,y) -
/// cosh d(x,z). Tolerance opts.tol (the suite passes 1e-5).
PropertyVerdict check_resolvent_forms(const Bifunction& f, const ConvexRegion& K, const HPoint& x, const PointGrid& grid,
                              const SolverOptions& opts, std::optional<double> tolerance = std::nullopt);

/// Same check at a precomputed z.
PropertyVerdict resolvent_forms_at(const Bifunction& f, const HPoint& x, const HPoint& z, const PointGrid& grid,
                           double tolerance);

/// KKM finite-intersection check for h(y,u) = f(y,u) + cosh d(x,u) - cosh d(x,y).
/// Family k (k < families) has family_size - (k mod family_size) members
/// sampled in C. (a) every depth-3 hull sample lies in some M(y_i) (tol 1e-8);
/// (b) some point of a spacing-`spacing` grid over C has max_i h(y_i,u) <= C_lip * spacing.
PropertyVerdict check_kkm(const Bifunction& f, const HPoint& x, const ConvexRegion& C, std::size_t family_size,
                          std::uint64_t seed, std::size_t families = 1, double spacing = 0.05);

/// A test problem: bifunction on a region plus what is known about it.
struct CatalogEntry {
    std::string name;
    Bifunction f;
    ConvexRegion K;
    /// A point of Equil f (unique when unique_equilibrium).
    std::optional<HPoint> equilibrium;
    bool unique_equilibrium = false;
};

/// Test matrix over the radius-2 ball around the origin of H^2: zero,
/// cosh-sum, distance, max of two cosh terms, regularized-diff.
std::vector<CatalogEntry> default_catalog();

struct SuiteOptions {
    std::uint64_t seed = 0;
    std::size_t geometry_trials = 10000;
    std::size_t condition_samples = 1000;
    std::size_t instances = 20;
    std::size_t firm_pairs = 200;
    std::size_t kkm_families = 50;
    std::size_t kkm_family_size = 8;
    std::size_t ppa_steps = 200;
    SolverOptions solver;
};

/// The instance-level checks for one entry; they share the solves.
struct InstanceVerdicts {
    PropertyVerdict agreement;
    PropertyVerdict single_valued;
    PropertyVerdict resolvent_forms;
};

InstanceVerdicts check_resolvent_instances(const CatalogEntry& e, std::uint64_t seed, std::size_t instances,
                                           const SolverOptions& opts);

/// Check_conditions as a verdict (slack = tolerance - violation per clause).
PropertyVerdict check_conditions_verdict(const CatalogEntry& e, std::uint64_t seed, std::size_t samples);

/// d(L_f p*, p*) <= 1e-6 and equilibrium_residual(L_f p*) >= -1e-5.
PropertyVerdict check_fixed_point(const CatalogEntry& e, const SolverOptions& opts);

/// PPA with lambda = 1 from a sampled start: Fejer monotonicity w.r.t. p*
/// (1e-6) and d(x_k, p*) < 1e-4 within max_steps.
PropertyVerdict check_ppa(const CatalogEntry& e, std::uint64_t seed, std::size_t max_steps,
                          const SolverOptions& opts);

/// The whole suite over the given entries (geometry checks first).
std::vector<PropertyVerdict> run_suite(const std::vector<CatalogEntry>& entries, const SuiteOptions& opts);

}  // namespace hypequil
