#include <immintrin.h>

#include <cmath>

#include "destake/kernel_abi.hpp"

#define DESTAKE_AVX2 __attribute__((target("avx2")))

namespace destake::kernels::avx2 {
namespace {

DESTAKE_AVX2 inline void spill(__m256d v, double (&lane)[4]) { _mm256_storeu_pd(lane, v); }

inline double fold(const double (&lane)[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

DESTAKE_AVX2 double sum(const double* x, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double lane[4];
    spill(acc, lane);
    for (; i < n; ++i)
        lane[i & 3] += x[i];
    return fold(lane);
}

DESTAKE_AVX2 double sum_squares(const double* x, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double lane[4];
    spill(acc, lane);
    for (; i < n; ++i)
        lane[i & 3] += x[i] * x[i];
    return fold(lane);
}

DESTAKE_AVX2 double rank_weighted_sum(const double* x, size_t n) {
    const double base = 1.0 - static_cast<double>(n);
    __m256d coeff = _mm256_setr_pd(base, base + 2.0, base + 4.0, base + 6.0);
    const __m256d step = _mm256_set1_pd(8.0);
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(coeff, _mm256_loadu_pd(x + i)));
        coeff = _mm256_add_pd(coeff, step);
    }
    double lane[4];
    spill(acc, lane);
    for (; i < n; ++i) {
        const double c = base + 2.0 * static_cast<double>(i);
        lane[i & 3] += c * x[i];
    }
    return fold(lane);
}

DESTAKE_AVX2 Moments centered_moments(const double* x, const double* y, size_t n,
                                      double mean_x, double mean_y) {
    const __m256d mx = _mm256_set1_pd(mean_x);
    const __m256d my = _mm256_set1_pd(mean_y);
    __m256d xx = _mm256_setzero_pd();
    __m256d yy = _mm256_setzero_pd();
    __m256d xy = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
        xx = _mm256_add_pd(xx, _mm256_mul_pd(dx, dx));
        yy = _mm256_add_pd(yy, _mm256_mul_pd(dy, dy));
        xy = _mm256_add_pd(xy, _mm256_mul_pd(dx, dy));
    }
    double lxx[4], lyy[4], lxy[4];
    spill(xx, lxx);
    spill(yy, lyy);
    spill(xy, lxy);
    for (; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        lxx[i & 3] += dx * dx;
        lyy[i & 3] += dy * dy;
        lxy[i & 3] += dx * dy;
    }
    return {fold(lxx), fold(lyy), fold(lxy)};
}

DESTAKE_AVX2 void sqrt(const double* in, double* out, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i)
        out[i] = std::sqrt(in[i]);
}

} // namespace

const KernelTable table{
    Isa::avx2, &sum, &sum_squares, &rank_weighted_sum, &centered_moments, &sqrt,
};

} // namespace destake::kernels::avx2
