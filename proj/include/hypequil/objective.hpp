#pragma once

// Convex objectives on H^n built from distance terms:
//
//   g(p) = max_i ( offset_i + sum_j w_ij * phi_ij(d(p, a_ij)) ),  phi in {cosh, identity}
//
// A single piece is a plain weighted sum; several pieces form a finite max.
// Nonnegative weights keep g geodesically convex (cosh d(a,.) is convex in any
// CAT(-1) space, d(a,.) in any CAT(0) space). Internally the solvers also
// build objectives with a negative cosh weight when the sum stays convex.

#include <optional>
#include <vector>

#include "hypequil/hyperbolic.hpp"
#include "hypequil/region.hpp"

namespace hypequil {

struct Term {
    enum class Kind { cosh_dist, dist };
    Kind kind = Kind::cosh_dist;
    double weight = 1.0;
    HPoint anchor;

    double value(const HPoint& p) const;
};

struct Piece {
    std::vector<Term> terms;
    double offset = 0.0;

    double value(const HPoint& p) const;
};

/// Gradient data for one piece at a point: the Riemannian gradient of the
/// smooth part plus the total weight of distance terms sitting on their kink
/// (their subdifferential there is the ball of that radius).
struct PieceGradient {
    Vec smooth;
    double kink_radius = 0.0;
};

class Objective {
public:
    /// g == 0.
    Objective() = default;
    explicit Objective(std::vector<Piece> pieces);
    static Objective sum(std::vector<Term> terms);

    const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    bool is_zero() const noexcept;
    bool is_max() const noexcept { return pieces_.size() > 1; }

    double value(const HPoint& p) const;
    std::vector<double> piece_values(const HPoint& p) const;

    /// g evaluated at every point of the cloud (batched through the SIMD kernels).
    std::vector<double> values(const PointCloud& cloud) const;

    /// Gradient of piece `i` at p. Distance terms with w*d(p,a) <= kink_eps
    /// contribute to kink_radius instead of the smooth part.
    PieceGradient piece_gradient(std::size_t i, const HPoint& p, double kink_eps) const;

    /// A subgradient: gradient of the lowest-index active piece; a distance term
    /// at its anchor contributes 0 (the anchor minimises it).
    TangentVec subgradient(const HPoint& p) const;

    /// lambda * g (lambda > 0).
    Objective scaled(double lambda) const;

    /// g + term, distributing the term into every piece.
    Objective plus(const Term& term) const;

    /// Smallest ambient dimension used by any anchor; nullopt for g == 0.
    std::optional<std::size_t> ambient_dim() const;

private:
    std::vector<Piece> pieces_;
};

}  // namespace hypequil
