#pragma once

// Geometry of the hyperboloid model of H^n.
//
// Points live on the upper sheet {x : <x,x> = -1, x_0 > 0} of Minkowski space
// R^{n,1} with <u,v> = -u_0 v_0 + sum_{i>=1} u_i v_i. Every operation below is
// a pure function of its arguments.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hypequil/error.hpp"

namespace hypequil {

/// Maximum ambient dimension (n + 1). Coordinates are stored inline.
inline constexpr std::size_t kMaxAmbient = 16;

/// Tolerance for the hyperboloid / tangency invariants.
inline constexpr double kInvariantTol = 1e-9;

/// Fixed-capacity ambient vector in R^{n,1}.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t ambient_dim);
    Vec(std::initializer_list<double> values);
    explicit Vec(std::span<const double> values);

    std::size_t size() const noexcept { return size_; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    std::span<const double> span() const noexcept { return {data_.data(), size_}; }
    std::span<double> span() noexcept { return {data_.data(), size_}; }
    std::vector<double> to_vector() const { return {data_.begin(), data_.begin() + size_}; }

    Vec& operator+=(const Vec& o) noexcept;
    Vec& operator-=(const Vec& o) noexcept;
    Vec& operator*=(double s) noexcept;

    friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
    friend Vec operator*(double s, Vec a) noexcept { return a *= s; }
    friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
    friend bool operator==(const Vec& a, const Vec& b) noexcept;

    /// Largest absolute coordinate difference; dimensions must match.
    friend double max_abs_diff(const Vec& a, const Vec& b) noexcept;

private:
    std::array<double, kMaxAmbient> data_{};
    std::size_t size_ = 0;
};

/// Minkowski bilinear form. Throws InputError on dimension mismatch.
double minkowski_form(const Vec& u, const Vec& v);

/// Unchecked variant for inner loops where dimensions are known to agree.
inline double minkowski_form_unchecked(const Vec& u, const Vec& v) noexcept {
    double s = -u[0] * v[0];
    for (std::size_t i = 1; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

/// A point on the upper sheet of the hyperboloid.
class HPoint {
public:
    /// Validates the invariants; throws InvariantError if <x,x> != -1 (1e-9) or x_0 < 1.
    explicit HPoint(const Vec& coords);
    HPoint(std::initializer_list<double> coords) : HPoint(Vec(coords)) {}

    /// The base point (1, 0, ..., 0) of H^n.
    static HPoint origin(std::size_t n);

    /// Point at geodesic distance `r` from the origin in the direction of the
    /// i-th spatial axis (1-based axis index).
    static HPoint along_axis(std::size_t n, std::size_t axis, double r);

    const Vec& coords() const noexcept { return coords_; }
    std::size_t ambient_dim() const noexcept { return coords_.size(); }
    /// Intrinsic dimension n.
    std::size_t dim() const noexcept { return coords_.size() - 1; }
    double operator[](std::size_t i) const noexcept { return coords_[i]; }

    friend bool operator==(const HPoint& a, const HPoint& b) noexcept { return a.coords_ == b.coords_; }

private:
    struct Trusted {};
    HPoint(const Vec& coords, Trusted) : coords_(coords) {}
    friend HPoint project_to_hyperboloid(const Vec& raw);
    friend HPoint exp_map_trusted(const HPoint& base, const Vec& vec) noexcept;

    Vec coords_;
};

/// A vector tangent to the hyperboloid at `base` (<base, vec> = 0).
class TangentVec {
public:
    /// Throws InvariantError if the vector is not tangent within 1e-9.
    TangentVec(HPoint base, const Vec& vec);

    /// Tangent-space projection of an arbitrary ambient vector: v + <v,base> base.
    static TangentVec project(const HPoint& base, const Vec& ambient);

    static TangentVec zero(const HPoint& base);

    const HPoint& base() const noexcept { return base_; }
    const Vec& vec() const noexcept { return vec_; }

    /// Riemannian norm sqrt(<v,v>); throws InputError if <v,v> < -1e-9 (not spacelike).
    double norm() const;

private:
    struct Trusted {};
    TangentVec(HPoint base, const Vec& vec, Trusted) : base_(std::move(base)), vec_(vec) {}

    HPoint base_;
    Vec vec_;
};

/// arccosh(clamp(-<x,y>, 1, inf)). Checks that both arguments share a dimension.
double dist(const HPoint& x, const HPoint& y);

/// cosh dist(x, y) without the arccosh round trip.
inline double cosh_dist(const HPoint& x, const HPoint& y) noexcept {
    const double c = -minkowski_form_unchecked(x.coords(), y.coords());
    return c < 1.0 ? 1.0 : c;
}

/// The point t*x (+) (1-t)*y, i.e. the point on [x,y] with d(x,z) = (1-t) d(x,y).
/// Throws InputError if t is outside [0,1].
HPoint geodesic_point(const HPoint& x, const HPoint& y, double t);

HPoint exp_map(const TangentVec& v);

/// exp_map without the tangency check; `vec` must already be tangent at `base`.
HPoint exp_map_trusted(const HPoint& base, const Vec& vec) noexcept;

TangentVec log_map(const HPoint& x, const HPoint& y);

/// raw / sqrt(-<raw,raw>). Throws InputError for spacelike/null or past-sheet input.
HPoint project_to_hyperboloid(const Vec& raw);

/// Poincare-ball coordinates: spatial coords / (1 + x_0).
std::vector<double> to_poincare(const HPoint& p);

/// Orthonormal basis (n vectors) of the tangent space at p.
std::vector<Vec> tangent_basis(const HPoint& p);

/// A geodesic segment parameterised by the (+) convention: point_at(t) = t*a (+) (1-t)*b.
class GeodesicSegment {
public:
    GeodesicSegment(HPoint a, HPoint b);

    const HPoint& a() const noexcept { return a_; }
    const HPoint& b() const noexcept { return b_; }
    double length() const noexcept { return length_; }

    /// point_at(1) = a, point_at(0) = b.
    HPoint point_at(double t) const { return geodesic_point(a_, b_, t); }

private:
    HPoint a_;
    HPoint b_;
    double length_;
};

std::string to_string(const HPoint& p);

}  // namespace hypequil
