#include "hypequil/bifunction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hypequil/random.hpp"

namespace hypequil {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_nonnegative(const Objective& g, const char* what) {
    for (const Piece& pc : g.pieces()) {
        for (const Term& t : pc.terms) {
            if (t.weight < 0.0) throw InputError(std::string(what) + ": negative weight");
        }
    }
}

std::vector<Piece> pieces_or_zero(const Objective& g) {
    if (g.pieces().empty()) return {Piece{}};
    return g.pieces();
}

void objective_row(const Objective& g, const HPoint& z, const PointGrid& ys, std::span<double> out) {
    const double gz = g.value(z);
    const std::vector<double> gy = g.values(ys.cloud());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gy[i] - gz;
}

}  // namespace

Bifunction::Bifunction(BifunctionDescriptor desc, double scale) : desc_(std::move(desc)), scale_(scale) {
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InputError("bifunction scale must be positive");
    if (const auto* r = std::get_if<RegularizedDiff>(&desc_)) {
        if (!(r->mu >= 0.0)) throw InputError("regularized-diff: mu must be >= 0");
    }
    if (const auto* m = std::get_if<MaxDiff>(&desc_)) {
        if (!(m->c > 0.0 && m->c <= 1.0)) throw InputError("max-diff: c must lie in (0,1]");
    }
    if (const auto* c = std::get_if<CustomBif>(&desc_)) {
        if (!c->fn) throw InputError("custom bifunction without a callable");
    }
}

double Bifunction::operator()(const HPoint& x, const HPoint& y) const {
    const double v = std::visit(
        overloaded{
            [&](const ObjectiveDiff& d) { return d.g.value(y) - d.g.value(x); },
            [&](const RegularizedDiff& d) {
                return d.g.value(y) - d.g.value(x) - d.mu * (cosh_dist(x, y) - 1.0);
            },
            [&](const MaxDiff& d) {
                return std::max(d.g.value(y) - d.g.value(x), d.c * (d.h.value(y) - d.h.value(x)));
            },
            [&](const DistanceBif&) { return dist(x, y); },
            [&](const NegSqDistanceBif&) {
                const double d = dist(x, y);
                return -d * d;
            },
            [&](const CustomBif& d) { return d.fn(x, y); },
        },
        desc_);
    return scale_ * v;
}

void Bifunction::eval_row(const HPoint& z, const PointGrid& ys, std::span<double> out) const {
    if (out.size() != ys.size()) throw InputError("eval_row: output size mismatch");
    const std::size_t n = ys.size();
    std::visit(overloaded{
                   [&](const ObjectiveDiff& d) { objective_row(d.g, z, ys, out); },
                   [&](const RegularizedDiff& d) {
                       objective_row(d.g, z, ys, out);
                       std::vector<double> c(n);
                       kernels::cosh_dists(z, ys.cloud(), c);
                       for (std::size_t i = 0; i < n; ++i) out[i] -= d.mu * (c[i] - 1.0);
                   },
                   [&](const MaxDiff& d) {
                       objective_row(d.g, z, ys, out);
                       std::vector<double> h(n);
                       objective_row(d.h, z, ys, h);
                       for (std::size_t i = 0; i < n; ++i) out[i] = std::max(out[i], d.c * h[i]);
                   },
                   [&](const DistanceBif&) { kernels::dists(z, ys.cloud(), out); },
                   [&](const NegSqDistanceBif&) {
                       kernels::dists(z, ys.cloud(), out);
                       for (double& v : out) v = -v * v;
                   },
                   [&](const CustomBif& d) {
                       for (std::size_t i = 0; i < n; ++i) out[i] = d.fn(z, ys[i]);
                   },
               },
               desc_);
    if (scale_ != 1.0) {
        for (double& v : out) v *= scale_;
    }
}

void Bifunction::eval_col(const PointGrid& ys, const HPoint& z, std::span<double> out) const {
    if (out.size() != ys.size()) throw InputError("eval_col: output size mismatch");
    const std::size_t n = ys.size();
    std::visit(overloaded{
                   [&](const ObjectiveDiff& d) {
                       objective_row(d.g, z, ys, out);
                       for (double& v : out) v = -v;
                   },
                   [&](const RegularizedDiff& d) {
                       objective_row(d.g, z, ys, out);
                       std::vector<double> c(n);
                       kernels::cosh_dists(z, ys.cloud(), c);
                       for (std::size_t i = 0; i < n; ++i) out[i] = -out[i] - d.mu * (c[i] - 1.0);
                   },
                   [&](const MaxDiff& d) {
                       objective_row(d.g, z, ys, out);
                       std::vector<double> h(n);
                       objective_row(d.h, z, ys, h);
                       for (std::size_t i = 0; i < n; ++i) out[i] = std::max(-out[i], -d.c * h[i]);
                   },
                   [&](const DistanceBif&) { kernels::dists(z, ys.cloud(), out); },
                   [&](const NegSqDistanceBif&) {
                       kernels::dists(z, ys.cloud(), out);
                       for (double& v : out) v = -v * v;
                   },
                   [&](const CustomBif& d) {
                       for (std::size_t i = 0; i < n; ++i) out[i] = d.fn(ys[i], z);
                   },
               },
               desc_);
    if (scale_ != 1.0) {
        for (double& v : out) v *= scale_;
    }
}

std::optional<Objective> Bifunction::optimization_objective() const {
    if (const auto* d = std::get_if<ObjectiveDiff>(&desc_)) return d->g.scaled(scale_);
    return std::nullopt;
}

std::optional<Objective> Bifunction::second_slot_objective(const HPoint& z) const {
    return std::visit(
        overloaded{
            [&](const ObjectiveDiff& d) -> std::optional<Objective> { return d.g.scaled(scale_); },
            [&](const RegularizedDiff& d) -> std::optional<Objective> {
                if (d.mu == 0.0) return d.g.scaled(scale_);
                return d.g.plus(Term{Term::Kind::cosh_dist, -d.mu, z}).scaled(scale_);
            },
            [&](const MaxDiff& d) -> std::optional<Objective> {
                std::vector<Piece> pieces;
                const double gz = d.g.value(z);
                for (Piece pc : pieces_or_zero(d.g)) {
                    pc.offset -= gz;
                    pieces.push_back(std::move(pc));
                }
                const double hz = d.h.value(z);
                for (Piece pc : pieces_or_zero(d.h)) {
                    pc.offset = d.c * (pc.offset - hz);
                    for (Term& t : pc.terms) t.weight *= d.c;
                    pieces.push_back(std::move(pc));
                }
                return Objective(std::move(pieces)).scaled(scale_);
            },
            [&](const DistanceBif&) -> std::optional<Objective> {
                return Objective::sum({Term{Term::Kind::dist, scale_, z}});
            },
            [&](const NegSqDistanceBif&) -> std::optional<Objective> { return std::nullopt; },
            [&](const CustomBif&) -> std::optional<Objective> { return std::nullopt; },
        },
        desc_);
}

bool Bifunction::is_zero() const {
    const auto* d = std::get_if<ObjectiveDiff>(&desc_);
    return d && d->g.is_zero();
}

// ---------------------------------------------------------------------------
// construction helpers

Bifunction make_optimization_bifunction(const Objective& g) {
    check_nonnegative(g, "make_optimization_bifunction");
    return Bifunction(ObjectiveDiff{g});
}

Bifunction scale_bifunction(const Bifunction& f, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("scale_bifunction: lambda must be positive");
    return Bifunction(f.descriptor(), f.scale() * lambda);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::vector<Term> terms_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array of terms");
    std::vector<Term> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& t = j[i];
        if (!t.is_object()) throw ParseError(p, "expected an object");
        reject_unknown_keys(t, p, {"w", "anchor", "kind"});
        if (!t.contains("anchor")) throw ParseError(p + ".anchor", "missing");
        Term term{Term::Kind::cosh_dist, 1.0, point_from_json(t["anchor"], p + ".anchor")};
        if (t.contains("w")) term.weight = number_at(t["w"], p + ".w");
        if (t.contains("kind")) {
            if (!t["kind"].is_string()) throw ParseError(p + ".kind", "expected \"cosh\" or \"dist\"");
            const std::string k = t["kind"].get<std::string>();
            if (k == "cosh") {
                term.kind = Term::Kind::cosh_dist;
            } else if (k == "dist") {
                term.kind = Term::Kind::dist;
            } else {
                throw ParseError(p + ".kind", "expected \"cosh\" or \"dist\"");
            }
        }
        if (term.weight < 0.0) throw ParseError(p + ".w", "weight must be >= 0");
        out.push_back(std::move(term));
    }
    return out;
}

Piece piece_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    reject_unknown_keys(j, path, {"terms", "offset"});
    Piece pc;
    if (j.contains("terms")) pc.terms = terms_from_json(j["terms"], path + ".terms");
    if (j.contains("offset")) pc.offset = number_at(j["offset"], path + ".offset");
    return pc;
}

json term_to_json(const Term& t) {
    return json{{"w", t.weight},
                {"anchor", point_to_json(t.anchor)},
                {"kind", t.kind == Term::Kind::cosh_dist ? "cosh" : "dist"}};
}

json piece_to_json(const Piece& pc) {
    json terms = json::array();
    for (const Term& t : pc.terms) terms.push_back(term_to_json(t));
    json out{{"terms", terms}};
    if (pc.offset != 0.0) out["offset"] = pc.offset;
    return out;
}

// Parses the objective fields of an object that may carry other keys.
Objective objective_fields(const json& j, const std::string& path) {
    if (j.contains("terms") && j.contains("max")) throw ParseError(path + ".max", "give either terms or max");
    if (j.contains("max")) {
        const json& m = j["max"];
        if (!m.is_array() || m.empty()) throw ParseError(path + ".max", "expected a nonempty array");
        std::vector<Piece> pieces;
        for (std::size_t i = 0; i < m.size(); ++i) {
            pieces.push_back(piece_from_json(m[i], path + ".max[" + std::to_string(i) + "]"));
        }
        return Objective(std::move(pieces));
    }
    Piece pc;
    if (j.contains("terms")) pc.terms = terms_from_json(j["terms"], path + ".terms");
    if (j.contains("offset")) pc.offset = number_at(j["offset"], path + ".offset");
    return Objective({pc});
}

void check_dims(const Objective& g, const std::string& path) {
    try {
        Objective copy(g.pieces());
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

}  // namespace

Objective objective_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    reject_unknown_keys(j, path, {"terms", "max", "offset"});
    Objective g = objective_fields(j, path);
    check_dims(g, path);
    return g;
}

json objective_to_json(const Objective& g) {
    if (g.pieces().empty()) return json{{"terms", json::array()}};
    if (g.pieces().size() == 1) return piece_to_json(g.pieces().front());
    json arr = json::array();
    for (const Piece& pc : g.pieces()) arr.push_back(piece_to_json(pc));
    return json{{"max", arr}};
}

Bifunction bifunction_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
    if (!j.contains("type") || !j["type"].is_string()) throw ParseError(path + ".type", "missing or not a string");
    const std::string type = j["type"].get<std::string>();
    double scale = 1.0;
    if (j.contains("scale")) {
        scale = number_at(j["scale"], path + ".scale");
        if (!(scale > 0.0)) throw ParseError(path + ".scale", "must be positive");
    }
    if (type == "zero") {
        reject_unknown_keys(j, path, {"type", "scale"});
        return Bifunction(ObjectiveDiff{}, scale);
    }
    if (type == "objective-diff") {
        reject_unknown_keys(j, path, {"type", "scale", "terms", "max", "offset"});
        return Bifunction(ObjectiveDiff{objective_fields(j, path)}, scale);
    }
    if (type == "regularized-diff") {
        reject_unknown_keys(j, path, {"type", "scale", "g", "mu"});
        if (!j.contains("g")) throw ParseError(path + ".g", "missing");
        if (!j.contains("mu")) throw ParseError(path + ".mu", "missing");
        const double mu = number_at(j["mu"], path + ".mu");
        if (mu < 0.0) throw ParseError(path + ".mu", "must be >= 0");
        return Bifunction(RegularizedDiff{objective_from_json(j["g"], path + ".g"), mu}, scale);
    }
    if (type == "max-diff") {
        reject_unknown_keys(j, path, {"type", "scale", "g", "h", "c"});
        for (const char* k : {"g", "h", "c"}) {
            if (!j.contains(k)) throw ParseError(path + "." + k, "missing");
        }
        const double c = number_at(j["c"], path + ".c");
        if (!(c > 0.0 && c <= 1.0)) throw ParseError(path + ".c", "must lie in (0,1]");
        return Bifunction(
            MaxDiff{objective_from_json(j["g"], path + ".g"), objective_from_json(j["h"], path + ".h"), c}, scale);
    }
    if (type == "distance") {
        reject_unknown_keys(j, path, {"type", "scale"});
        return Bifunction(DistanceBif{}, scale);
    }
    if (type == "neg-sq-distance") {
        reject_unknown_keys(j, path, {"type", "scale"});
        return Bifunction(NegSqDistanceBif{}, scale);
    }
    throw ParseError(path + ".type", "unknown bifunction type \"" + type + "\"");
}

json Bifunction::to_json() const {
    json out = std::visit(
        overloaded{
            [](const ObjectiveDiff& d) {
                if (d.g.is_zero() && d.g.pieces().empty()) return json{{"type", "zero"}};
                json o = objective_to_json(d.g);
                o["type"] = "objective-diff";
                return o;
            },
            [](const RegularizedDiff& d) {
                return json{{"type", "regularized-diff"}, {"g", objective_to_json(d.g)}, {"mu", d.mu}};
            },
            [](const MaxDiff& d) {
                return json{{"type", "max-diff"},
                            {"g", objective_to_json(d.g)},
                            {"h", objective_to_json(d.h)},
                            {"c", d.c}};
            },
            [](const DistanceBif&) { return json{{"type", "distance"}}; },
            [](const NegSqDistanceBif&) { return json{{"type", "neg-sq-distance"}}; },
            [](const CustomBif& d) { return json{{"type", "custom"}, {"name", d.name}}; },
        },
        desc_);
    out["scale"] = scale_;
    return out;
}

// ---------------------------------------------------------------------------
// condition checker

namespace {

constexpr std::array<double, 3> kHemiT{1e-2, 1e-3, 1e-4};

// Value at t = 0 of the quadratic through (t_k, v_k).
double extrapolate_to_zero(const std::array<double, 3>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        double w = 1.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j != k) w *= kHemiT[j] / (kHemiT[j] - kHemiT[k]);
        }
        s += w * v[k];
    }
    return s;
}

}  // namespace

double clause_violation(const Bifunction& f, std::size_t index, const std::vector<HPoint>& w) {
    switch (index) {
        case 0:
            return std::abs(f(w.at(0), w.at(0)));
        case 1:
            return std::max(0.0, f(w.at(0), w.at(1)) + f(w.at(1), w.at(0)));
        case 2: {
            const HPoint m = geodesic_point(w.at(1), w.at(2), 0.5);
            return std::max(0.0, f(w[0], m) - 0.5 * f(w[0], w[1]) - 0.5 * f(w[0], w[2]));
        }
        case 3: {
            std::array<double, 3> v{};
            for (std::size_t k = 0; k < 3; ++k) v[k] = f(geodesic_point(w.at(0), w.at(1), 1.0 - kHemiT[k]), w.at(2));
            return std::max(0.0, extrapolate_to_zero(v) - f(w[0], w[2]));
        }
        default:
            throw InputError("clause index out of range");
    }
}

bool ConditionReport::all_pass() const noexcept {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.pass; });
}

json ConditionReport::to_json() const {
    json arr = json::array();
    for (const ClauseResult& c : clauses) {
        json w = json::array();
        for (const HPoint& p : c.witness) w.push_back(point_to_json(p));
        arr.push_back(json{{"clause", c.name},
                           {"pass", c.pass},
                           {"worst", c.worst},
                           {"tolerance", c.tolerance},
                           {"checks", c.checks},
                           {"witness", w}});
    }
    return json{{"samples", samples}, {"clauses", arr}};
}

ConditionReport check_conditions(const Bifunction& f, const ConvexRegion& region, std::uint64_t seed,
                                 std::size_t samples, double bounding_radius) {
    ConditionReport rep;
    rep.samples = samples;
    rep.clauses[0] = {"reflexive", true, 0.0, 1e-10, {}, 0};
    rep.clauses[1] = {"monotone", true, 0.0, 1e-10, {}, 0};
    rep.clauses[2] = {"convex-second", true, 0.0, 1e-8, {}, 0};
    rep.clauses[3] = {"hemicontinuous-first", true, 0.0, 1e-6, {}, 0};
    if (samples == 0) return rep;

    const double radius = std::min(bounding_radius, region.extent());
    const std::vector<HPoint> pts = sample(region, seed, samples, radius);
    const std::size_t n = pts.size();

    auto record = [&](std::size_t c, double v, std::vector<HPoint> w) {
        ClauseResult& r = rep.clauses[c];
        ++r.checks;
        if (v > r.worst || r.witness.empty()) {
            r.worst = std::max(r.worst, v);
            r.witness = std::move(w);
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const HPoint& x = pts[i];
        const HPoint& y = pts[(i + 1) % n];
        const HPoint& z = pts[(i + 2) % n];
        record(0, clause_violation(f, 0, {x}), {x});
        record(1, clause_violation(f, 1, {x, y}), {x, y});
        record(2, clause_violation(f, 2, {x, y, z}), {x, y, z});
        record(3, clause_violation(f, 3, {x, y, z}), {x, y, z});
    }
    for (ClauseResult& r : rep.clauses) r.pass = r.worst <= r.tolerance;
    return rep;
}

}  // namespace hypequil
