#pragma once

// Proximal point iteration x_{k+1} = L_{lambda_k f} x_k.

#include <cstdint>
#include <string>
#include <vector>

#include "hypequil/resolvent.hpp"

namespace hypequil {

/// lambda_k = initial * ratio^k (ratio 1 gives a constant schedule).
struct LambdaSchedule {
    double initial = 1.0;
    double ratio = 1.0;

    double at(std::size_t k) const;
    void validate() const;
};

enum class TraceStatus { converged, max_steps, solver_error };

std::string to_string(TraceStatus s);

/// Row k describes step k+1: the iterate x_{k+1}, d(x_k, x_{k+1}), the
/// equilibrium residual of x_{k+1}, the lambda used and the wall-clock time.
struct IterTrace {
    HPoint start;
    std::vector<HPoint> iterates;
    std::vector<double> step_distances;
    std::vector<double> residuals;
    std::vector<double> lambdas;
    std::vector<std::int64_t> micros;
    TraceStatus status = TraceStatus::max_steps;
    std::string error;

    std::size_t size() const noexcept { return iterates.size(); }

    /// Header `step,coord_0,...,coord_n,step_distance,residual,lambda,micros`.
    /// With include_timing false the micros column is written as 0, which keeps
    /// the file byte-identical across runs.
    std::string to_csv(bool include_timing = true) const;
};

/// min_{y in grid} f(z, y). Throws InputError on an empty grid.
double equilibrium_residual(const Bifunction& f, const ConvexRegion& K, const HPoint& z, const PointGrid& grid);

/// Runs at most max_steps resolvent steps from x0, stopping once a step moves
/// less than stop_tol. Residuals are measured on a grid of spacing
/// opts.grid_spacing over K ∩ B(witness, effective radius). An inner solver
/// error ends the trace with status solver_error.
IterTrace run_ppa(const Bifunction& f, const ConvexRegion& K, const HPoint& x0, const LambdaSchedule& lambdas,
                  double stop_tol, std::size_t max_steps, const SolverOptions& opts);

}  // namespace hypequil
