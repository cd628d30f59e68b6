#include <cmath>

#include "destake/kernel_abi.hpp"

namespace destake::kernels::scalar {
namespace {

inline double fold(const double (&lane)[4]) { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }

double sum(const double* x, size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (size_t i = 0; i < n; ++i)
        lane[i & 3] += x[i];
    return fold(lane);
}

double sum_squares(const double* x, size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (size_t i = 0; i < n; ++i)
        lane[i & 3] += x[i] * x[i];
    return fold(lane);
}

double rank_weighted_sum(const double* x, size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const double base = 1.0 - static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        const double coeff = base + 2.0 * static_cast<double>(i);
        lane[i & 3] += coeff * x[i];
    }
    return fold(lane);
}

Moments centered_moments(const double* x, const double* y, size_t n, double mean_x,
                         double mean_y) {
    double xx[4] = {0.0, 0.0, 0.0, 0.0};
    double yy[4] = {0.0, 0.0, 0.0, 0.0};
    double xy[4] = {0.0, 0.0, 0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        xx[i & 3] += dx * dx;
        yy[i & 3] += dy * dy;
        xy[i & 3] += dx * dy;
    }
    return {fold(xx), fold(yy), fold(xy)};
}

void sqrt(const double* in, double* out, size_t n) {
    for (size_t i = 0; i < n; ++i)
        out[i] = std::sqrt(in[i]);
}

} // namespace

const KernelTable table{
    Isa::scalar, &sum, &sum_squares, &rank_weighted_sum, &centered_moments, &sqrt,
};

} // namespace destake::kernels::scalar
