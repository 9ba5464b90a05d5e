#pragma once

// Batched Minkowski-form kernels over structure-of-arrays point clouds.
//
// Every grid scan in the library (merit tables, oracle search, certificates,
// covering checks) reduces to "dot one query against N stored points". The
// scalar table is the reference; the AVX2 table computes the same sums in the
// same order per lane, so results are bit-identical (the library is built with
// -ffp-contract=off).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hypequil/hyperbolic.hpp"

namespace hypequil {

/// Coordinate-major storage: coord(d)[i] is the d-th ambient coordinate of point i.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::size_t ambient_dim) : ambient_(ambient_dim), coords_(ambient_dim) {}
    explicit PointCloud(std::span<const HPoint> points);

    std::size_t ambient_dim() const noexcept { return ambient_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    void push_back(const HPoint& p);
    void reserve(std::size_t n);

    /// Contiguous array of the d-th coordinate of every point.
    std::span<const double> coord(std::size_t d) const noexcept { return coords_[d]; }

private:
    std::size_t ambient_ = 0;
    std::size_t count_ = 0;
    std::vector<std::vector<double>> coords_;
};

namespace kernels {

/// out[i] = <query, p_i>
using DotFn = void (*)(std::span<const double> query, const PointCloud& cloud, std::span<double> out);
/// out[i] += weight * max(1, -<query, p_i>)   (weighted cosh distance)
using AccumCoshFn = void (*)(std::span<const double> query, double weight, const PointCloud& cloud,
                             std::span<double> out);

struct Table {
    std::string_view name;
    DotFn dot;
    AccumCoshFn accum_cosh;
};

const Table& scalar();

/// AVX2 table, or nullptr when the CPU (or the build) does not support it.
const Table* avx2();

/// Table used by the library. AVX2 when available unless the environment
/// variable HYPEQUIL_KERNELS=scalar forces the reference path.
const Table& active();

// Convenience wrappers dispatching through active().

void minkowski_dots(const HPoint& query, const PointCloud& cloud, std::span<double> out);

/// out[i] = cosh d(query, p_i)
void cosh_dists(const HPoint& query, const PointCloud& cloud, std::span<double> out);

/// out[i] = d(query, p_i)
void dists(const HPoint& query, const PointCloud& cloud, std::span<double> out);

/// Index of the stored point nearest to `query`; lowest index on ties.
/// Cloud must be non-empty.
std::size_t nearest(const HPoint& query, const PointCloud& cloud);

}  // namespace kernels
}  // namespace hypequil
