#pragma once

// Bifunctions f : K x K -> R for equilibrium problems, with a descriptor that
// round-trips through the config format, batched row/column evaluation over
// grids, and a sampling checker for the four monotone-bifunction conditions:
//   (i) f(x,x) = 0, (ii) f(x,y) + f(y,x) <= 0, (iii) f(x,.) convex,
//   (iv) f(.,y) upper hemicontinuous.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypequil/io.hpp"
#include "hypequil/objective.hpp"
#include "hypequil/region.hpp"

namespace hypequil {

/// f(x,y) = g(y) - g(x).
struct ObjectiveDiff {
    Objective g;
};

/// f(x,y) = g(y) - g(x) - mu (cosh d(x,y) - 1), mu >= 0. Monotone with
/// f(x,y) + f(y,x) = -2 mu (cosh d - 1) < 0 off the diagonal; convex in y on a
/// region of diameter D when g is a cosh sum of total weight W >= mu cosh D.
struct RegularizedDiff {
    Objective g;
    double mu;
};

/// f(x,y) = max(g(y) - g(x), c (h(y) - h(x))), c in (0,1].
struct MaxDiff {
    Objective g;
    Objective h;
    double c;
};

/// f(x,y) = d(x,y). Not monotone; kept to exercise the checker.
struct DistanceBif {};

/// f(x,y) = -d(x,y)^2. Concave in y; kept to exercise the checker.
struct NegSqDistanceBif {};

/// Arbitrary callable; serializes as {"type":"custom","name":...} and cannot be parsed back.
struct CustomBif {
    std::string name;
    std::function<double(const HPoint&, const HPoint&)> fn;
};

using BifunctionDescriptor =
    std::variant<ObjectiveDiff, RegularizedDiff, MaxDiff, DistanceBif, NegSqDistanceBif, CustomBif>;

class Bifunction {
public:
    /// f == 0.
    Bifunction() : desc_(ObjectiveDiff{}) {}
    explicit Bifunction(BifunctionDescriptor desc, double scale = 1.0);

    const BifunctionDescriptor& descriptor() const noexcept { return desc_; }
    double scale() const noexcept { return scale_; }

    double operator()(const HPoint& x, const HPoint& y) const;

    /// out[i] = f(z, y_i).
    void eval_row(const HPoint& z, const PointGrid& ys, std::span<double> out) const;
    /// out[i] = f(y_i, z).
    void eval_col(const PointGrid& ys, const HPoint& z, std::span<double> out) const;

    /// g when f(x,y) = lambda (g(y) - g(x)) (returned already scaled by lambda).
    std::optional<Objective> optimization_objective() const;

    /// y -> f(z,y) as an Objective, up to an additive constant, when the catalog
    /// form allows it. nullopt for distance-type, concave and custom instances.
    std::optional<Objective> second_slot_objective(const HPoint& z) const;

    bool is_zero() const;

    json to_json() const;

private:
    BifunctionDescriptor desc_;
    double scale_ = 1.0;
};

/// f(x,y) = g(y) - g(x). Rejects negative weights (convexity needs them >= 0).
Bifunction make_optimization_bifunction(const Objective& g);

/// lambda * f, lambda > 0.
Bifunction scale_bifunction(const Bifunction& f, double lambda);

/// Parses an objective {"terms":[...]} or {"max":[{"terms":[...]}, ...]}.
Objective objective_from_json(const json& j, const std::string& path);
json objective_to_json(const Objective& g);

/// Parses a bifunction descriptor. Errors name the offending path under `path`.
Bifunction bifunction_from_json(const json& j, const std::string& path);

struct ClauseResult {
    std::string name;
    bool pass = true;
    /// Largest violation observed (>= 0).
    double worst = 0.0;
    double tolerance = 0.0;
    /// Inputs reproducing `worst`: (x) for (i); (x,y) for (ii); (x,y,z) for
    /// (iii) with the midpoint of y,z in the second slot; (x,y,w) for (iv).
    std::vector<HPoint> witness;
    std::size_t checks = 0;
};

struct ConditionReport {
    std::array<ClauseResult, 4> clauses;
    std::size_t samples = 0;

    bool all_pass() const noexcept;
    json to_json() const;
};

/// Re-evaluates the violation of clause `index` (0-based) at a witness.
double clause_violation(const Bifunction& f, std::size_t index, const std::vector<HPoint>& witness);

/// Samples `samples` points of region (within bounding_radius of its witness)
/// and tests each clause on them. Deterministic for a fixed seed.
ConditionReport check_conditions(const Bifunction& f, const ConvexRegion& region, std::uint64_t seed,
                                 std::size_t samples, double bounding_radius = 6.0);

}  // namespace hypequil
