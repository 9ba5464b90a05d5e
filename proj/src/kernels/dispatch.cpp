#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace hypequil {

PointCloud::PointCloud(std::span<const HPoint> points) {
    if (points.empty()) return;
    ambient_ = points.front().ambient_dim();
    reserve(points.size());
    for (const HPoint& p : points) push_back(p);
}

void PointCloud::reserve(std::size_t n) {
    coords_.resize(ambient_);
    for (auto& c : coords_) c.reserve(n);
}

void PointCloud::push_back(const HPoint& p) {
    if (ambient_ == 0) ambient_ = p.ambient_dim();
    if (p.ambient_dim() != ambient_) throw InputError("PointCloud: dimension mismatch");
    coords_.resize(ambient_);
    for (std::size_t d = 0; d < ambient_; ++d) coords_[d].push_back(p[d]);
    ++count_;
}

namespace kernels {

const Table& scalar() {
    static const Table table{"scalar", &detail::dot_scalar, &detail::accum_cosh_scalar};
    return table;
}

const Table* avx2() {
#if defined(HYPEQUIL_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    static const Table table{"avx2", &detail::dot_avx2, &detail::accum_cosh_avx2};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const Table& active() {
    static const Table& chosen = [] () -> const Table& {
        const char* env = std::getenv("HYPEQUIL_KERNELS");
        if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar();
        if (const Table* t = avx2()) return *t;
        return scalar();
    }();
    return chosen;
}

void minkowski_dots(const HPoint& query, const PointCloud& cloud, std::span<double> out) {
    if (query.ambient_dim() != cloud.ambient_dim()) throw InputError("minkowski_dots: dimension mismatch");
    active().dot(query.coords().span(), cloud, out);
}

void cosh_dists(const HPoint& query, const PointCloud& cloud, std::span<double> out) {
    minkowski_dots(query, cloud, out);
    for (double& v : out.first(cloud.size())) {
        v = -v;
        v = v < 1.0 ? 1.0 : v;
    }
}

void dists(const HPoint& query, const PointCloud& cloud, std::span<double> out) {
    cosh_dists(query, cloud, out);
    for (double& v : out.first(cloud.size())) v = std::acosh(v);
}

std::size_t nearest(const HPoint& query, const PointCloud& cloud) {
    if (cloud.empty()) throw InputError("nearest: empty point cloud");
    std::vector<double> dots(cloud.size());
    minkowski_dots(query, cloud, dots);
    // Nearest point maximises <q, p> (= -cosh d).
    std::size_t best = 0;
    for (std::size_t i = 1; i < dots.size(); ++i) {
        if (dots[i] > dots[best]) best = i;
    }
    return best;
}

}  // namespace kernels
}  // namespace hypequil
