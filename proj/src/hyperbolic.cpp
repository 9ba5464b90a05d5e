#include "hypequil/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hypequil {

namespace {

void require_same_dim(const Vec& u, const Vec& v, const char* what) {
    if (u.size() != v.size()) {
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
    }
}

}  // namespace

Vec::Vec(std::size_t ambient_dim) : size_(ambient_dim) {
    if (ambient_dim == 0 || ambient_dim > kMaxAmbient) {
        throw InputError("ambient dimension must be in [1, " + std::to_string(kMaxAmbient) + "]");
    }
}

Vec::Vec(std::initializer_list<double> values) : Vec(std::span<const double>(values.begin(), values.size())) {}

Vec::Vec(std::span<const double> values) : Vec(values.size()) {
    std::copy(values.begin(), values.end(), data_.begin());
}

Vec& Vec::operator+=(const Vec& o) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] += o.data_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] -= o.data_[i];
    return *this;
}

Vec& Vec::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < size_; ++i) data_[i] *= s;
    return *this;
}

bool operator==(const Vec& a, const Vec& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.data_.begin(), a.data_.begin() + a.size_, b.data_.begin());
}

double max_abs_diff(const Vec& a, const Vec& b) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double minkowski_form(const Vec& u, const Vec& v) {
    require_same_dim(u, v, "minkowski_form");
    return minkowski_form_unchecked(u, v);
}

HPoint::HPoint(const Vec& coords) : coords_(coords) {
    if (coords.size() < 2) throw InvariantError("HPoint needs at least 2 ambient coordinates");
    const double form = minkowski_form_unchecked(coords, coords);
    // Relative check: far from the origin the coordinates grow like cosh r.
    const double scale = std::max(1.0, coords[0] * coords[0]);
    if (std::abs(form + 1.0) > kInvariantTol * scale) {
        throw InvariantError("point is off the hyperboloid: <x,x> = " + std::to_string(form));
    }
    if (coords[0] < 1.0 - kInvariantTol) {
        throw InvariantError("point is not on the upper sheet: x_0 = " + std::to_string(coords[0]));
    }
}

HPoint HPoint::origin(std::size_t n) {
    Vec v(n + 1);
    v[0] = 1.0;
    return HPoint(v, Trusted{});
}

HPoint HPoint::along_axis(std::size_t n, std::size_t axis, double r) {
    if (axis == 0 || axis > n) throw InputError("along_axis: axis must be in [1, n]");
    Vec v(n + 1);
    v[0] = std::cosh(r);
    v[axis] = std::sinh(r);
    return HPoint(v, Trusted{});
}

TangentVec::TangentVec(HPoint base, const Vec& vec) : base_(std::move(base)), vec_(vec) {
    require_same_dim(base_.coords(), vec, "TangentVec");
    const double form = minkowski_form_unchecked(base_.coords(), vec);
    double scale = 1.0;
    for (std::size_t i = 0; i < vec.size(); ++i) scale = std::max(scale, std::abs(vec[i]) * std::abs(base_[i]));
    if (std::abs(form) > kInvariantTol * scale) {
        throw InvariantError("vector is not tangent at its base: <base,v> = " + std::to_string(form));
    }
}

TangentVec TangentVec::project(const HPoint& base, const Vec& ambient) {
    require_same_dim(base.coords(), ambient, "TangentVec::project");
    Vec v = ambient;
    v += minkowski_form_unchecked(ambient, base.coords()) * base.coords();
    return TangentVec(base, v, Trusted{});
}

TangentVec TangentVec::zero(const HPoint& base) { return TangentVec(base, Vec(base.ambient_dim()), Trusted{}); }

double TangentVec::norm() const {
    const double q = minkowski_form_unchecked(vec_, vec_);
    if (q < -kInvariantTol) throw InputError("tangent vector is not spacelike: <v,v> = " + std::to_string(q));
    return std::sqrt(std::max(q, 0.0));
}

double dist(const HPoint& x, const HPoint& y) {
    require_same_dim(x.coords(), y.coords(), "dist");
    const double c = cosh_dist(x, y);
    if (c > 1.5) return std::acosh(c);
    // Near the diagonal acosh loses half the digits; use |x-y|_M = 2 sinh(d/2).
    const Vec diff = x.coords() - y.coords();
    const double q = minkowski_form_unchecked(diff, diff);
    return 2.0 * std::asinh(0.5 * std::sqrt(std::max(q, 0.0)));
}

HPoint project_to_hyperboloid(const Vec& raw) {
    const double q = minkowski_form_unchecked(raw, raw);
    if (!(q < 0.0)) throw InputError("project_to_hyperboloid: vector is not timelike");
    if (!(raw[0] > 0.0)) throw InputError("project_to_hyperboloid: vector is on the past sheet");
    Vec v = raw;
    v *= 1.0 / std::sqrt(-q);
    return HPoint(v, HPoint::Trusted{});
}

HPoint geodesic_point(const HPoint& x, const HPoint& y, double t) {
    require_same_dim(x.coords(), y.coords(), "geodesic_point");
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("geodesic_point: t must lie in [0,1]");
    if (t == 1.0 || x == y) return x;
    if (t == 0.0) return y;
    const double d = dist(x, y);
    if (d < 1e-8) return project_to_hyperboloid(t * x.coords() + (1.0 - t) * y.coords());
    const double s = std::sinh(d);
    Vec raw = (std::sinh(t * d) / s) * x.coords();
    raw += (std::sinh((1.0 - t) * d) / s) * y.coords();
    return project_to_hyperboloid(raw);
}

HPoint exp_map_trusted(const HPoint& base, const Vec& vec) noexcept {
    const double q = minkowski_form_unchecked(vec, vec);
    const double len = q > 0.0 ? std::sqrt(q) : 0.0;
    if (len < 1e-12) return base;
    Vec raw = std::cosh(len) * base.coords();
    raw += (std::sinh(len) / len) * vec;
    // Back onto the sheet through x_0 = sqrt(1 + |x_spatial|^2); rescaling by
    // sqrt(-<raw,raw>) cancels catastrophically once cosh(len)^2 ~ 1/eps.
    double s2 = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i) s2 += raw[i] * raw[i];
    raw[0] = std::sqrt(1.0 + s2);
    return HPoint(raw, HPoint::Trusted{});
}

HPoint exp_map(const TangentVec& v) {
    (void)v.norm();  // rejects timelike input
    return exp_map_trusted(v.base(), v.vec());
}

TangentVec log_map(const HPoint& x, const HPoint& y) {
    require_same_dim(x.coords(), y.coords(), "log_map");
    const double d = dist(x, y);
    if (d < 1e-12) return TangentVec::zero(x);
    const TangentVec u = TangentVec::project(x, y.coords());
    const double un = std::sqrt(std::max(minkowski_form_unchecked(u.vec(), u.vec()), 0.0));
    if (un == 0.0) return TangentVec::zero(x);
    return TangentVec::project(x, (d / un) * u.vec());
}

std::vector<double> to_poincare(const HPoint& p) {
    std::vector<double> out(p.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i + 1] / (1.0 + p[0]);
    return out;
}

std::vector<Vec> tangent_basis(const HPoint& p) {
    const std::size_t n = p.dim();
    std::vector<Vec> basis;
    basis.reserve(n);
    for (std::size_t axis = 1; axis <= n; ++axis) {
        Vec e(n + 1);
        e[axis] = 1.0;
        Vec v = TangentVec::project(p, e).vec();
        for (const Vec& b : basis) v -= minkowski_form_unchecked(v, b) * b;
        v *= 1.0 / std::sqrt(minkowski_form_unchecked(v, v));
        basis.push_back(v);
    }
    return basis;
}

GeodesicSegment::GeodesicSegment(HPoint a, HPoint b) : a_(std::move(a)), b_(std::move(b)), length_(dist(a_, b_)) {}

std::string to_string(const HPoint& p) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < p.ambient_dim(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", p[i]);
        os << (i ? ", " : "") << buf;
    }
    os << ']';
    return os.str();
}

}  // namespace hypequil
