#include "kernels_impl.hpp"

namespace hypequil::kernels::detail {

void dot_scalar(std::span<const double> query, const PointCloud& cloud, std::span<double> out) {
    const std::size_t n = cloud.size();
    const double* c0 = cloud.coord(0).data();
    const double nq0 = -query[0];
    for (std::size_t i = 0; i < n; ++i) out[i] = nq0 * c0[i];
    for (std::size_t d = 1; d < cloud.ambient_dim(); ++d) {
        const double* cd = cloud.coord(d).data();
        const double qd = query[d];
        for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + qd * cd[i];
    }
}

void accum_cosh_scalar(std::span<const double> query, double weight, const PointCloud& cloud,
                       std::span<double> out) {
    const std::size_t n = cloud.size();
    const std::size_t dim = cloud.ambient_dim();
    const double nq0 = -query[0];
    for (std::size_t i = 0; i < n; ++i) {
        double s = nq0 * cloud.coord(0)[i];
        for (std::size_t d = 1; d < dim; ++d) s = s + query[d] * cloud.coord(d)[i];
        double c = -s;
        c = c < 1.0 ? 1.0 : c;
        out[i] = out[i] + weight * c;
    }
}

}  // namespace hypequil::kernels::detail
