#include "cnav/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cnav::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_pair_distances_scalar(const double* px, const double* py, std::size_t m,
                                 const double* qx, const double* qy, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = qx[j] - px[i];
            const double dy = qy[j] - py[i];
            acc += std::sqrt(dx * dx + dy * dy);
        }
    }
    return acc;
}

double ray_discs_scalar(double ox, double oy, double dx, double dy, const double* cx,
                        const double* cy, const double* radius, std::size_t n, double max_t) {
    double best = max_t;
    for (std::size_t j = 0; j < n; ++j) {
        const double ex = ox - cx[j];
        const double ey = oy - cy[j];
        const double b = ex * dx + ey * dy;
        const double c = ex * ex + ey * ey - radius[j] * radius[j];
        if (c <= 0.0) return 0.0;
        const double disc = b * b - c;
        if (disc < 0.0) continue;
        const double t = -b - std::sqrt(disc);
        if (t >= 0.0 && t < best) best = t;
    }
    return best;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, &dot_scalar, &axpy_scalar,
                                   &sum_pair_distances_scalar, &ray_discs_scalar};
    return table;
}

}  // namespace cnav::simd
