#pragma once

// Projected Riemannian (sub)gradient descent with Armijo backtracking for
// Objective over a ConvexRegion.

#include <cstddef>

#include "hypequil/objective.hpp"
#include "hypequil/region.hpp"

namespace hypequil {

struct DescentOptions {
    double tol = 1e-8;
    std::size_t max_iters = 10000;
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
};

struct DescentResult {
    HPoint z;
    double value;
    std::size_t iterations;
    /// Gradient-mapping residual d(z, P_K(exp_z(-v))) at the returned point.
    double residual;
};

/// Minimum-norm element of conv{ g_i + r_i * B } for tangent vectors g_i at a
/// common base point (B the unit ball). Exact when all r_i are zero or when
/// there is a single generator.
Vec min_norm_element(const std::vector<PieceGradient>& gens);

/// Same plus the cone spanned by `cone` (outward constraint normals). The
/// cone is only honoured when every r_i is zero.
Vec min_norm_element(const std::vector<PieceGradient>& gens, const std::vector<Vec>& cone);

/// Minimises `objective` over `region` from `start`. Each iteration steps along
/// minus the min-norm element of the eps-active subdifferential, with eps
/// shrinking as the iterate settles. Stops when the gradient-mapping residual
/// drops below tol. Throws ConvergenceError (carrying the best iterate) after
/// max_iters iterations.
DescentResult minimize(const Objective& objective, const ConvexRegion& region, const HPoint& start,
                       const DescentOptions& opts = {});

}  // namespace hypequil
