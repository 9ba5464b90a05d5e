#include "hypequil/objective.hpp"

#include <algorithm>
#include <cmath>

namespace hypequil {

double Term::value(const HPoint& p) const {
    return kind == Kind::cosh_dist ? weight * cosh_dist(p, anchor) : weight * dist(p, anchor);
}

double Piece::value(const HPoint& p) const {
    double s = offset;
    for (const Term& t : terms) s += t.value(p);
    return s;
}

Objective::Objective(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.size() == 1 && pieces_.front().terms.empty() && pieces_.front().offset == 0.0) pieces_.clear();
    std::optional<std::size_t> dim;
    for (const Piece& pc : pieces_) {
        for (const Term& t : pc.terms) {
            if (dim && *dim != t.anchor.ambient_dim()) throw InputError("objective anchors have mixed dimensions");
            dim = t.anchor.ambient_dim();
            if (!std::isfinite(t.weight)) throw InputError("objective weight must be finite");
        }
    }
}

Objective Objective::sum(std::vector<Term> terms) { return Objective({Piece{std::move(terms), 0.0}}); }

bool Objective::is_zero() const noexcept {
    return std::all_of(pieces_.begin(), pieces_.end(),
                       [](const Piece& p) { return p.terms.empty() && p.offset == 0.0; });
}

double Objective::value(const HPoint& p) const {
    if (pieces_.empty()) return 0.0;
    double best = pieces_.front().value(p);
    for (std::size_t i = 1; i < pieces_.size(); ++i) best = std::max(best, pieces_[i].value(p));
    return best;
}

std::vector<double> Objective::piece_values(const HPoint& p) const {
    std::vector<double> out;
    out.reserve(pieces_.size());
    for (const Piece& pc : pieces_) out.push_back(pc.value(p));
    return out;
}

std::vector<double> Objective::values(const PointCloud& cloud) const {
    const std::size_t n = cloud.size();
    std::vector<double> out(n, 0.0);
    if (pieces_.empty()) return out;
    std::vector<double> piece(n);
    std::vector<double> scratch(n);
    const kernels::Table& k = kernels::active();
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        std::fill(piece.begin(), piece.end(), pieces_[i].offset);
        for (const Term& t : pieces_[i].terms) {
            if (t.kind == Term::Kind::cosh_dist) {
                k.accum_cosh(t.anchor.coords().span(), t.weight, cloud, piece);
            } else {
                k.dot(t.anchor.coords().span(), cloud, scratch);
                for (std::size_t j = 0; j < n; ++j) {
                    double c = -scratch[j];
                    c = c < 1.0 ? 1.0 : c;
                    piece[j] += t.weight * std::acosh(c);
                }
            }
        }
        if (i == 0) {
            out = piece;
        } else {
            for (std::size_t j = 0; j < n; ++j) out[j] = std::max(out[j], piece[j]);
        }
    }
    return out;
}

PieceGradient Objective::piece_gradient(std::size_t i, const HPoint& p, double kink_eps) const {
    PieceGradient g{Vec(p.ambient_dim()), 0.0};
    for (const Term& t : pieces_.at(i).terms) {
        if (t.kind == Term::Kind::cosh_dist) {
            // grad cosh d(a, .) at p = -a + cosh d(a,p) p
            Vec v = -1.0 * t.anchor.coords();
            v += cosh_dist(p, t.anchor) * p.coords();
            g.smooth += t.weight * TangentVec::project(p, v).vec();
        } else {
            const double d = dist(p, t.anchor);
            if (std::abs(t.weight) * d <= kink_eps || d < 1e-15) {
                g.kink_radius += std::abs(t.weight);
            } else {
                // grad d(a, .) at p = -log_p(a) / d
                g.smooth += (-t.weight / d) * log_map(p, t.anchor).vec();
            }
        }
    }
    return g;
}

TangentVec Objective::subgradient(const HPoint& p) const {
    if (pieces_.empty()) return TangentVec::zero(p);
    const std::vector<double> vals = piece_values(p);
    const auto active = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    return TangentVec::project(p, piece_gradient(active, p, 0.0).smooth);
}

Objective Objective::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InputError("objective scale must be positive");
    std::vector<Piece> out = pieces_;
    for (Piece& pc : out) {
        pc.offset *= lambda;
        for (Term& t : pc.terms) t.weight *= lambda;
    }
    return Objective(std::move(out));
}

Objective Objective::plus(const Term& term) const {
    std::vector<Piece> out = pieces_;
    if (out.empty()) out.push_back(Piece{});
    for (Piece& pc : out) pc.terms.push_back(term);
    return Objective(std::move(out));
}

std::optional<std::size_t> Objective::ambient_dim() const {
    for (const Piece& pc : pieces_) {
        if (!pc.terms.empty()) return pc.terms.front().anchor.ambient_dim();
    }
    return std::nullopt;
}

}  // namespace hypequil
