#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "destake/stake.hpp"

namespace destake::sim {

/// budget: each epoch mints alpha * S_total, shared in proportion to weight
/// (r_k = alpha * S * w_k / W). per_weight: r_k = alpha * w_k(s_k).
enum class RewardMode { budget, per_weight };

struct SimulationConfig {
    std::size_t epochs = 100;
    double annual_inflation = 0.045;
    std::size_t epochs_per_year = 1;
    WeightScheme scheme = WeightScheme::linear();
    std::size_t proposer_rounds = 0;
    std::uint64_t seed = 0;
    RewardMode reward_mode = RewardMode::budget;

    double alpha() const noexcept {
        return annual_inflation / static_cast<double>(epochs_per_year);
    }
};

struct SimulationTrace {
    WeightScheme scheme = WeightScheme::linear();
    std::vector<std::string> ids;            // snapshot order
    std::vector<std::vector<double>> stakes; // epochs + 1 rows, row 0 = initial
    std::vector<double> gini;                // Gini of stakes per row
    std::vector<double> richest_median_ratio;
    std::vector<std::uint64_t> proposer_counts;
};

/// Throws InvalidArgument for epochs = 0, epochs_per_year = 0 or a negative or
/// non-finite inflation rate.
void validate(const SimulationConfig& config);

/// Compounds rewards into stake for config.epochs epochs, recomputing weights
/// under the scheme every epoch. Proposers are drawn on the initial weights.
SimulationTrace run_compounding(const StakeSnapshot& snapshot, const SimulationConfig& config);

/// `rounds` independent draws with probability w_k / W each, from a
/// mt19937_64 seeded with `seed`.
std::vector<std::uint64_t> sample_proposers(const WeightVector& wv, std::size_t rounds,
                                            std::uint64_t seed);

/// Fraction of rounds won by the first ceil(m/10) validators in snapshot order
/// (the richest decile). 0 when no rounds were played.
double top_decile_share(std::span<const std::uint64_t> counts);

} // namespace destake::sim
