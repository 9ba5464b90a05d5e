// Compiled with -mavx2 only; reached solely through the runtime dispatch in
// dispatch.cpp after a CPU feature check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace hypequil::kernels::detail {

void dot_avx2(std::span<const double> query, const PointCloud& cloud, std::span<double> out) {
    const std::size_t n = cloud.size();
    const std::size_t dim = cloud.ambient_dim();
    const double* c0 = cloud.coord(0).data();
    const __m256d nq0 = _mm256_set1_pd(-query[0]);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_mul_pd(nq0, _mm256_loadu_pd(c0 + i));
        for (std::size_t d = 1; d < dim; ++d) {
            const __m256d qd = _mm256_set1_pd(query[d]);
            s = _mm256_add_pd(s, _mm256_mul_pd(qd, _mm256_loadu_pd(cloud.coord(d).data() + i)));
        }
        _mm256_storeu_pd(out.data() + i, s);
    }
    for (; i < n; ++i) {
        double s = -query[0] * c0[i];
        for (std::size_t d = 1; d < dim; ++d) s = s + query[d] * cloud.coord(d)[i];
        out[i] = s;
    }
}

void accum_cosh_avx2(std::span<const double> query, double weight, const PointCloud& cloud,
                     std::span<double> out) {
    const std::size_t n = cloud.size();
    const std::size_t dim = cloud.ambient_dim();
    const double* c0 = cloud.coord(0).data();
    const __m256d nq0 = _mm256_set1_pd(-query[0]);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d w = _mm256_set1_pd(weight);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_mul_pd(nq0, _mm256_loadu_pd(c0 + i));
        for (std::size_t d = 1; d < dim; ++d) {
            const __m256d qd = _mm256_set1_pd(query[d]);
            s = _mm256_add_pd(s, _mm256_mul_pd(qd, _mm256_loadu_pd(cloud.coord(d).data() + i)));
        }
        const __m256d c = _mm256_max_pd(_mm256_xor_pd(s, sign), one);
        const __m256d acc = _mm256_loadu_pd(out.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(acc, _mm256_mul_pd(w, c)));
    }
    for (; i < n; ++i) {
        double s = -query[0] * c0[i];
        for (std::size_t d = 1; d < dim; ++d) s = s + query[d] * cloud.coord(d)[i];
        double c = -s;
        c = c < 1.0 ? 1.0 : c;
        out[i] = out[i] + weight * c;
    }
}

}  // namespace hypequil::kernels::detail
