#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "destake/stake.hpp"

namespace destake::testing {

inline StakeSnapshot snapshot_of(const std::vector<Stake>& stakes, std::string chain = "test") {
    std::vector<ValidatorRecord> records;
    records.reserve(stakes.size());
    for (std::size_t i = 0; i < stakes.size(); ++i)
        records.push_back({fmt::format("v{:03}", i), stakes[i]});
    return StakeSnapshot::create(std::move(chain), std::nullopt, std::move(records));
}

inline StakeSnapshot snapshot_of_ints(const std::vector<unsigned long long>& stakes,
                                      std::string chain = "test") {
    return snapshot_of(std::vector<Stake>(stakes.begin(), stakes.end()), std::move(chain));
}

enum class Family { uniform, lognormal, pareto };

inline const char* family_name(Family f) {
    switch (f) {
    case Family::uniform: return "uniform";
    case Family::lognormal: return "lognormal";
    case Family::pareto: return "pareto";
    }
    return "?";
}

// Stakes in base-unit magnitudes (>= 1e3). Pareto uses inverse-CDF sampling.
inline std::vector<Stake> draw_stakes(std::mt19937_64& rng, Family family, std::size_t m,
                                      double pareto_shape = 1.16) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Stake> out(m);
    for (auto& s : out) {
        double x = 0.0;
        switch (family) {
        case Family::uniform: x = 1e3 + unit(rng) * 1e6; break;
        case Family::lognormal:
            // Folded at the mode so no stake falls below the 1e3 floor.
            x = 1e3 * std::exp(std::abs(std::normal_distribution<double>(0.0, 2.5)(rng)));
            break;
        case Family::pareto: x = 1e3 / std::pow(1.0 - unit(rng), 1.0 / pareto_shape); break;
        }
        s = static_cast<Stake>(std::round(std::min(x, 1e24)));
    }
    return out;
}

struct CorpusCase {
    Family family;
    std::vector<Stake> stakes;
};

// Deterministic mixed corpus: families cycle, m drawn from [m_lo, m_hi].
inline std::vector<CorpusCase> corpus(std::size_t count, std::uint64_t seed, std::size_t m_lo = 4,
                                      std::size_t m_hi = 300) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> size(m_lo, m_hi);
    std::vector<CorpusCase> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto family = static_cast<Family>(i % 3);
        out.push_back({family, draw_stakes(rng, family, size(rng))});
    }
    return out;
}

} // namespace destake::testing
