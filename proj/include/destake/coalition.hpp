#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "destake/stake.hpp"

namespace destake {

inline constexpr std::size_t kDefaultExactLimit = 20;
inline constexpr std::size_t kMinShapleySamples = 1000;

enum class GameKind { liveness, safety };

/// exact_fraction: thresholds 1/3 and 2/3. literal: 0.33 and 0.66 as written
/// in the value functions of the weighted voting games.
enum class ThresholdMode { exact_fraction, literal };

enum class Strictness { strict, non_strict };

/// Weighted voting game: a coalition wins when its weight exceeds (or, for
/// non-strict games, reaches) num/den of the total weight.
class VotingGame {
public:
    VotingGame(const WeightVector& weights, std::uint32_t num, std::uint32_t den,
               Strictness strictness = Strictness::strict);

    static VotingGame liveness(const WeightVector& weights,
                               ThresholdMode mode = ThresholdMode::exact_fraction);
    static VotingGame safety(const WeightVector& weights,
                             ThresholdMode mode = ThresholdMode::exact_fraction);
    static VotingGame of(GameKind kind, const WeightVector& weights,
                         ThresholdMode mode = ThresholdMode::exact_fraction);

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double total() const noexcept { return total_; }
    double threshold_fraction() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    Strictness strictness() const noexcept { return strictness_; }

    /// v(S) for a coalition of the given weight.
    bool wins(double coalition_weight) const noexcept {
        const double lhs = static_cast<double>(den_) * coalition_weight;
        const double rhs = static_cast<double>(num_) * total_;
        return strictness_ == Strictness::strict ? lhs > rhs : lhs >= rhs;
    }

private:
    std::vector<double> weights_;
    double total_;
    std::uint32_t num_;
    std::uint32_t den_;
    Strictness strictness_;
};

enum class ShapleyMethod { exact, sampled };

struct ShapleyResult {
    std::vector<double> values;
    ShapleyMethod method = ShapleyMethod::exact;
    std::size_t samples = 0;     // sampled only
    std::uint64_t seed = 0;      // sampled only
    double std_error_max = 0.0;  // sampled only

    // Exact only: phi_k = numerators[k] / denominator with denominator = m!.
    std::vector<std::int64_t> numerators;
    std::int64_t denominator = 0;

    // Sampled only: how often each validator was pivotal.
    std::vector<std::uint64_t> pivot_counts;
};

/// Shapley values by enumerating every coalition. Throws TooLarge when the game
/// has more than `exact_limit` players (at most 20).
ShapleyResult shapley_exact(const VotingGame& game,
                            std::size_t exact_limit = kDefaultExactLimit);

/// Monte Carlo estimate over uniformly random arrival orders. Permutation j is
/// drawn from its own stream keyed by (seed, j), so the result does not depend
/// on `threads` (0 = hardware concurrency). Throws InsufficientSamples below
/// kMinShapleySamples.
ShapleyResult shapley_sampled(const VotingGame& game, std::size_t samples, std::uint64_t seed,
                              unsigned threads = 0);

/// Gini index of the Shapley vector.
double shapley_gini(const ShapleyResult& result);

/// Pearson correlation between weights and Shapley values; nullopt when either
/// vector has zero variance. Throws InvalidArgument on length mismatch.
std::optional<double> stake_shapley_correlation(const WeightVector& wv,
                                                const ShapleyResult& result);

/// Pearson correlation of two equal-length series; nullopt on zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

} // namespace destake
