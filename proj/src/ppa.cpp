#include "hypequil/ppa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hypequil {

double LambdaSchedule::at(std::size_t k) const { return initial * std::pow(ratio, static_cast<double>(k)); }

void LambdaSchedule::validate() const {
    if (!(initial > 0.0) || !std::isfinite(initial)) throw InputError("lambda schedule: initial must be positive");
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw InputError("lambda schedule: ratio must be positive");
}

std::string to_string(TraceStatus s) {
    switch (s) {
        case TraceStatus::converged:
            return "converged";
        case TraceStatus::max_steps:
            return "max-steps";
        case TraceStatus::solver_error:
            return "solver-error";
    }
    return "?";
}

std::string IterTrace::to_csv(bool include_timing) const {
    std::string out = "step";
    const std::size_t dim = start.ambient_dim();
    for (std::size_t i = 0; i < dim; ++i) out += ",coord_" + std::to_string(i);
    out += ",step_distance,residual,lambda,micros\n";
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        out += std::to_string(k + 1);
        for (std::size_t i = 0; i < dim; ++i) out += "," + format_double(iterates[k][i]);
        out += "," + format_double(step_distances[k]);
        out += "," + format_double(residuals[k]);
        out += "," + format_double(lambdas[k]);
        out += "," + std::to_string(include_timing ? micros[k] : 0);
        out += "\n";
    }
    return out;
}

double equilibrium_residual(const Bifunction& f, const ConvexRegion& K, const HPoint& z, const PointGrid& grid) {
    (void)K;
    if (grid.empty()) throw InputError("equilibrium_residual: empty grid");
    std::vector<double> row(grid.size());
    f.eval_row(z, grid, row);
    return *std::min_element(row.begin(), row.end());
}

IterTrace run_ppa(const Bifunction& f, const ConvexRegion& K, const HPoint& x0, const LambdaSchedule& lambdas,
                  double stop_tol, std::size_t max_steps, const SolverOptions& opts) {
    lambdas.validate();
    opts.validate();
    if (!(stop_tol > 0.0)) throw InputError("run_ppa: stop_tol must be positive");
    const PointGrid grid = build_grid(K, opts.grid_spacing, effective_radius(K, opts));

    IterTrace trace{x0, {}, {}, {}, {}, {}, TraceStatus::max_steps, {}};
    HPoint x = x0;
    for (std::size_t k = 0; k < max_steps; ++k) {
        const double lambda = lambdas.at(k);
        const auto t0 = std::chrono::steady_clock::now();
        HPoint next = x;
        try {
            SolverOptions inner = opts;
            inner.seed = opts.seed + k;
            next = resolve(scale_bifunction(f, lambda), K, x, inner, &grid).z;
        } catch (const Error& e) {
            trace.status = TraceStatus::solver_error;
            trace.error = e.what();
            return trace;
        }
        const auto t1 = std::chrono::steady_clock::now();
        const double step = dist(x, next);
        trace.iterates.push_back(next);
        trace.step_distances.push_back(step);
        trace.residuals.push_back(equilibrium_residual(f, K, next, grid));
        trace.lambdas.push_back(lambda);
        trace.micros.push_back(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
        x = next;
        if (step < stop_tol) {
            trace.status = TraceStatus::converged;
            break;
        }
    }
    return trace;
}

}  // namespace hypequil
