#pragma once

#include <span>
#include <string_view>

#include "destake/kernel_abi.hpp"

namespace destake::kernels {

std::string_view name(Isa isa) noexcept;

// Table for the requested ISA, or nullptr when it is not compiled in or the CPU
// lacks it.
const KernelTable* table_for(Isa isa) noexcept;

// Best supported table, chosen once. DESTAKE_ISA=scalar|avx2|neon overrides the
// choice when the requested ISA is available.
const KernelTable& active() noexcept;

inline double sum(std::span<const double> x) noexcept {
    return active().sum(x.data(), x.size());
}

inline double sum_squares(std::span<const double> x) noexcept {
    return active().sum_squares(x.data(), x.size());
}

inline double rank_weighted_sum(std::span<const double> sorted_ascending) noexcept {
    return active().rank_weighted_sum(sorted_ascending.data(), sorted_ascending.size());
}

// Caller guarantees x.size() == y.size().
inline Moments centered_moments(std::span<const double> x, std::span<const double> y,
                                double mean_x, double mean_y) noexcept {
    return active().centered_moments(x.data(), y.data(), x.size(), mean_x, mean_y);
}

// Caller guarantees out.size() >= in.size().
inline void sqrt(std::span<const double> in, std::span<double> out) noexcept {
    active().sqrt(in.data(), out.data(), in.size());
}

} // namespace destake::kernels
