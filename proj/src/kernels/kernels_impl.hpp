#pragma once

#include "hypequil/kernels.hpp"

namespace hypequil::kernels::detail {

void dot_scalar(std::span<const double> query, const PointCloud& cloud, std::span<double> out);
void accum_cosh_scalar(std::span<const double> query, double weight, const PointCloud& cloud,
                       std::span<double> out);

#if defined(HYPEQUIL_HAVE_AVX2)
void dot_avx2(std::span<const double> query, const PointCloud& cloud, std::span<double> out);
void accum_cosh_avx2(std::span<const double> query, double weight, const PointCloud& cloud,
                     std::span<double> out);
#endif

}  // namespace hypequil::kernels::detail
