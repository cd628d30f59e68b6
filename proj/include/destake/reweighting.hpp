#pragma once

#include <optional>
#include <span>
#include <vector>

#include "destake/stake.hpp"

namespace destake::reweight {

struct RewardParams {
    double alpha = 1.0;        // per-epoch inflation factor, > 0
    double sybil_cost = 0.0;   // C, cost per additional identity
    std::optional<std::size_t> cap_M;
    // s_M given directly. Validators with stake below it earn nothing.
    std::optional<Stake> stake_threshold;
};

struct ValidatorSelection {
    StakeSnapshot selected;
    Stake threshold = 0; // s_M, stake of the last selected candidate
};

/// Top min(M, |candidates|) candidates by stake, ties by ascending id.
/// Throws EmptySet for no candidates and InvalidArgument for M = 0.
ValidatorSelection select_validator_set(std::span<const ValidatorRecord> candidates,
                                        std::size_t M);

/// r_k = alpha * w_k for every paid validator, aligned with snapshot order.
/// When cap_M is set, candidates outside the top M earn 0; when
/// stake_threshold is set, stakes below it earn 0.
std::vector<double> epoch_rewards(const StakeSnapshot& snapshot, const WeightScheme& scheme,
                                  const RewardParams& params);

struct SybilAnalysis {
    Stake stake = 0;
    std::size_t parts = 0;
    WeightScheme scheme = WeightScheme::linear();
    double single_reward = 0.0;      // alpha * w(S)
    double split_reward = 0.0;       // n * alpha * w(S / n)
    double min_deterrent_cost = 0.0; // per extra identity
    // Closed-form reference: alpha (sqrt n - 1)/(n - 1) sqrt S for srsw and the
    // large-S approximation alpha ln(n)/(n - 1) for lsw. Absent otherwise.
    std::optional<double> reference_bound;
    bool rational_to_split = false;  // at params.sybil_cost
};

/// Throws InvalidSplit unless n >= 2 and S >= n; InvalidArgument for alpha <= 0.
SybilAnalysis sybil_split_analysis(Stake S, std::size_t n, const WeightScheme& scheme,
                                   const RewardParams& params);

/// w(s_i) > w(s_j) + w(s_k) - C/alpha: keeping one identity beats this split.
/// Throws InvalidSplit unless all stakes are positive and s_i >= s_j + s_k.
bool check_split_inequality(Stake s_i, Stake s_j, Stake s_k, const WeightScheme& scheme,
                            const RewardParams& params);

} // namespace destake::reweight
