#include "destake/reweighting.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "destake/error.hpp"

namespace destake::reweight {
namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw Error(Errc::invalid_argument, fmt::format("alpha must be positive, got {}", alpha));
}

} // namespace

ValidatorSelection select_validator_set(std::span<const ValidatorRecord> candidates,
                                        std::size_t M) {
    if (candidates.empty())
        throw Error(Errc::empty_set, "no validator candidates");
    if (M == 0)
        throw Error(Errc::invalid_argument, "validator set cap M must be at least 1");

    // create() sorts into canonical order, which is the ranking we need.
    StakeSnapshot ranked = StakeSnapshot::create(
        "", std::nullopt, std::vector<ValidatorRecord>(candidates.begin(), candidates.end()));
    const auto all = ranked.validators();
    const std::size_t keep = std::min(M, all.size());
    std::vector<ValidatorRecord> top(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
    const Stake threshold = top.back().stake;
    return {StakeSnapshot::create("", std::nullopt, std::move(top)), threshold};
}

std::vector<double> epoch_rewards(const StakeSnapshot& snapshot, const WeightScheme& scheme,
                                  const RewardParams& params) {
    require_alpha(params.alpha);
    const WeightVector wv = compute_weights(snapshot, scheme);
    const auto validators = snapshot.validators();

    // Canonical order is the ranking, so the cap keeps a prefix.
    const std::size_t paid = params.cap_M ? std::min(*params.cap_M, validators.size())
                                          : validators.size();
    std::vector<double> rewards(validators.size(), 0.0);
    for (std::size_t k = 0; k < paid; ++k) {
        if (params.stake_threshold && validators[k].stake < *params.stake_threshold)
            continue;
        rewards[k] = params.alpha * wv[k];
    }
    return rewards;
}

SybilAnalysis sybil_split_analysis(Stake S, std::size_t n, const WeightScheme& scheme,
                                   const RewardParams& params) {
    require_alpha(params.alpha);
    if (n < 2)
        throw Error(Errc::invalid_split, fmt::format("a split needs at least 2 parts, got {}", n));
    if (S < n)
        throw Error(Errc::invalid_split,
                    fmt::format("stake {} cannot be split into {} positive integer parts",
                                format_stake(S), n));

    const WeightScheme canon = scheme.canonical();
    const double stake = to_double(S);
    const double parts = static_cast<double>(n);

    SybilAnalysis a;
    a.stake = S;
    a.parts = n;
    a.scheme = canon;
    a.single_reward = params.alpha * canon.weight_of(stake);
    if (canon.kind() == SchemeKind::linear)
        a.split_reward = a.single_reward; // additive: splitting changes nothing
    else
        a.split_reward = parts * params.alpha * canon.weight_of(stake / parts);

    a.min_deterrent_cost = std::max(0.0, (a.split_reward - a.single_reward) / (parts - 1.0));
    a.rational_to_split =
        a.split_reward - (parts - 1.0) * params.sybil_cost > a.single_reward;

    if (canon.kind() == SchemeKind::srsw)
        a.reference_bound = params.alpha * (std::sqrt(parts) - 1.0) / (parts - 1.0) * std::sqrt(stake);
    else if (canon.kind() == SchemeKind::lsw)
        a.reference_bound = params.alpha * std::log(parts) / (parts - 1.0);
    return a;
}

bool check_split_inequality(Stake s_i, Stake s_j, Stake s_k, const WeightScheme& scheme,
                            const RewardParams& params) {
    require_alpha(params.alpha);
    if (s_i == 0 || s_j == 0 || s_k == 0)
        throw Error(Errc::invalid_split, "split stakes must be positive");
    if (s_j + s_k < s_j || s_i < s_j + s_k)
        throw Error(Errc::invalid_split,
                    fmt::format("s_i = {} must be at least s_j + s_k = {} + {}", format_stake(s_i),
                                format_stake(s_j), format_stake(s_k)));
    const WeightScheme canon = scheme.canonical();
    if (canon.kind() == SchemeKind::linear) {
        // Exact integer comparison; w is additive.
        const double margin = to_double(s_i - s_j - s_k);
        return margin > -params.sybil_cost / params.alpha;
    }
    const double lhs = canon.weight_of(to_double(s_i));
    const double rhs = canon.weight_of(to_double(s_j)) + canon.weight_of(to_double(s_k)) -
                       params.sybil_cost / params.alpha;
    return lhs > rhs;
}

} // namespace destake::reweight
