#pragma once

// Plain-C kernel ABI shared by the scalar, AVX2 and NEON translation units.
// Kept free of standard-library headers so the SIMD units compile stand-alone.

#include <stddef.h>

namespace destake::kernels {

enum class Isa { scalar, avx2, neon };

struct Moments {
    double sxx;
    double syy;
    double sxy;
};

// Every reduction accumulates element i into lane i % 4 and folds the lanes
// as (l0 + l1) + (l2 + l3). Scalar and vector variants therefore agree bit for bit.
struct KernelTable {
    Isa isa;
    double (*sum)(const double* x, size_t n);
    double (*sum_squares)(const double* x, size_t n);
    // sum over i = 1..n of (2i - n - 1) * x_i
    double (*rank_weighted_sum)(const double* x, size_t n);
    Moments (*centered_moments)(const double* x, const double* y, size_t n, double mean_x,
                                double mean_y);
    void (*sqrt)(const double* in, double* out, size_t n);
};

namespace scalar {
extern const KernelTable table;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable table;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const KernelTable table;
}
#endif

} // namespace destake::kernels
