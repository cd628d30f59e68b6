#include <arm_neon.h>

#include "destake/kernel_abi.hpp"

// Lanes 0,1 live in `lo`, lanes 2,3 in `hi`, mirroring the 4-lane scalar order.

namespace destake::kernels::neon {
namespace {

struct Acc {
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);

    void spill(double (&lane)[4]) const {
        vst1q_f64(lane, lo);
        vst1q_f64(lane + 2, hi);
    }
};

inline double fold(const double (&lane)[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

double sum(const double* x, size_t n) {
    Acc acc;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc.lo = vaddq_f64(acc.lo, vld1q_f64(x + i));
        acc.hi = vaddq_f64(acc.hi, vld1q_f64(x + i + 2));
    }
    double lane[4];
    acc.spill(lane);
    for (; i < n; ++i)
        lane[i & 3] += x[i];
    return fold(lane);
}

double sum_squares(const double* x, size_t n) {
    Acc acc;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t a = vld1q_f64(x + i);
        const float64x2_t b = vld1q_f64(x + i + 2);
        acc.lo = vaddq_f64(acc.lo, vmulq_f64(a, a));
        acc.hi = vaddq_f64(acc.hi, vmulq_f64(b, b));
    }
    double lane[4];
    acc.spill(lane);
    for (; i < n; ++i)
        lane[i & 3] += x[i] * x[i];
    return fold(lane);
}

double rank_weighted_sum(const double* x, size_t n) {
    const double base = 1.0 - static_cast<double>(n);
    const double c_lo[2] = {base, base + 2.0};
    const double c_hi[2] = {base + 4.0, base + 6.0};
    float64x2_t coeff_lo = vld1q_f64(c_lo);
    float64x2_t coeff_hi = vld1q_f64(c_hi);
    const float64x2_t step = vdupq_n_f64(8.0);
    Acc acc;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc.lo = vaddq_f64(acc.lo, vmulq_f64(coeff_lo, vld1q_f64(x + i)));
        acc.hi = vaddq_f64(acc.hi, vmulq_f64(coeff_hi, vld1q_f64(x + i + 2)));
        coeff_lo = vaddq_f64(coeff_lo, step);
        coeff_hi = vaddq_f64(coeff_hi, step);
    }
    double lane[4];
    acc.spill(lane);
    for (; i < n; ++i) {
        const double c = base + 2.0 * static_cast<double>(i);
        lane[i & 3] += c * x[i];
    }
    return fold(lane);
}

Moments centered_moments(const double* x, const double* y, size_t n, double mean_x,
                         double mean_y) {
    const float64x2_t mx = vdupq_n_f64(mean_x);
    const float64x2_t my = vdupq_n_f64(mean_y);
    Acc xx, yy, xy;
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t dx_lo = vsubq_f64(vld1q_f64(x + i), mx);
        const float64x2_t dx_hi = vsubq_f64(vld1q_f64(x + i + 2), mx);
        const float64x2_t dy_lo = vsubq_f64(vld1q_f64(y + i), my);
        const float64x2_t dy_hi = vsubq_f64(vld1q_f64(y + i + 2), my);
        xx.lo = vaddq_f64(xx.lo, vmulq_f64(dx_lo, dx_lo));
        xx.hi = vaddq_f64(xx.hi, vmulq_f64(dx_hi, dx_hi));
        yy.lo = vaddq_f64(yy.lo, vmulq_f64(dy_lo, dy_lo));
        yy.hi = vaddq_f64(yy.hi, vmulq_f64(dy_hi, dy_hi));
        xy.lo = vaddq_f64(xy.lo, vmulq_f64(dx_lo, dy_lo));
        xy.hi = vaddq_f64(xy.hi, vmulq_f64(dx_hi, dy_hi));
    }
    double lxx[4], lyy[4], lxy[4];
    xx.spill(lxx);
    yy.spill(lyy);
    xy.spill(lxy);
    for (; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        lxx[i & 3] += dx * dx;
        lyy[i & 3] += dy * dy;
        lxy[i & 3] += dx * dy;
    }
    return {fold(lxx), fold(lyy), fold(lxy)};
}

void sqrt(const double* in, double* out, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vsqrtq_f64(vld1q_f64(in + i)));
    for (; i < n; ++i)
        out[i] = vgetq_lane_f64(vsqrtq_f64(vdupq_n_f64(in[i])), 0);
}

} // namespace

const KernelTable table{
    Isa::neon, &sum, &sum_squares, &rank_weighted_sum, &centered_moments, &sqrt,
};

} // namespace destake::kernels::neon
