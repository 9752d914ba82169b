// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "cnav/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace cnav::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmin(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_pair_distances_avx2(const double* px, const double* py, std::size_t m,
                               const double* qx, const double* qy, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    double tail = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const __m256d vx = _mm256_set1_pd(px[i]);
        const __m256d vy = _mm256_set1_pd(py[i]);
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(qx + j), vx);
            const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(qy + j), vy);
            acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy))));
        }
        for (; j < n; ++j) {
            const double dx = qx[j] - px[i];
            const double dy = qy[j] - py[i];
            tail += std::sqrt(dx * dx + dy * dy);
        }
    }
    return hsum(acc) + tail;
}

double ray_discs_avx2(double ox, double oy, double dx, double dy, const double* cx,
                      const double* cy, const double* radius, std::size_t n, double max_t) {
    const __m256d vox = _mm256_set1_pd(ox);
    const __m256d voy = _mm256_set1_pd(oy);
    const __m256d vdx = _mm256_set1_pd(dx);
    const __m256d vdy = _mm256_set1_pd(dy);
    const __m256d zero = _mm256_setzero_pd();
    __m256d best = _mm256_set1_pd(max_t);
    // Returns false when the origin lies inside one of the four discs.
    auto block = [&](const double* bx, const double* by, const double* br) {
        const __m256d ex = _mm256_sub_pd(vox, _mm256_loadu_pd(bx));
        const __m256d ey = _mm256_sub_pd(voy, _mm256_loadu_pd(by));
        const __m256d r = _mm256_loadu_pd(br);
        const __m256d b = _mm256_fmadd_pd(ex, vdx, _mm256_mul_pd(ey, vdy));
        const __m256d c = _mm256_fmsub_pd(ex, ex, _mm256_fmsub_pd(r, r, _mm256_mul_pd(ey, ey)));
        if (_mm256_movemask_pd(_mm256_cmp_pd(c, zero, _CMP_LE_OQ)) != 0) return false;
        const __m256d disc = _mm256_fmsub_pd(b, b, c);
        const __m256d t = _mm256_sub_pd(_mm256_sub_pd(zero, b), _mm256_sqrt_pd(_mm256_max_pd(disc, zero)));
        const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(disc, zero, _CMP_GE_OQ),
                                         _mm256_cmp_pd(t, zero, _CMP_GE_OQ));
        best = _mm256_min_pd(best, _mm256_blendv_pd(best, t, ok));
        return true;
    };
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        if (!block(cx + j, cy + j, radius + j)) return 0.0;
    }
    if (j < n) {
        // Pad the tail with zero-radius discs one metre to the side of the ray
        // so every disc goes through the same arithmetic whatever its index.
        alignas(32) double tx[4], ty[4], tr[4];
        for (std::size_t k = 0; k < 4; ++k) {
            const bool real = j + k < n;
            tx[k] = real ? cx[j + k] : ox - dy;
            ty[k] = real ? cy[j + k] : oy + dx;
            tr[k] = real ? radius[j + k] : 0.0;
        }
        if (!block(tx, ty, tr)) return 0.0;
    }
    return hmin(best);
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{Isa::avx2, &dot_avx2, &axpy_avx2, &sum_pair_distances_avx2,
                                   &ray_discs_avx2};
    return table;
}

}  // namespace cnav::simd
