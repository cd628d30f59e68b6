#include "destake/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "destake/concentration.hpp"
#include "destake/error.hpp"
#include "destake/kernels.hpp"

namespace destake::sim {
namespace {

double richest_over_median(std::span<const double> stakes) {
    std::vector<double> v(stakes.begin(), stakes.end());
    const std::size_t mid = (v.size() - 1) / 2; // lower median
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double median = v[mid];
    const double richest = *std::max_element(v.begin(), v.end());
    return richest / median;
}

void weigh(const WeightScheme& scheme, std::span<const double> stakes, std::vector<double>& out) {
    switch (scheme.kind()) {
    case SchemeKind::linear:
        std::copy(stakes.begin(), stakes.end(), out.begin());
        break;
    case SchemeKind::srsw:
        kernels::sqrt(stakes, out);
        break;
    default:
        for (std::size_t k = 0; k < stakes.size(); ++k)
            out[k] = scheme.weight_of(stakes[k]);
    }
}

} // namespace

void validate(const SimulationConfig& config) {
    if (config.epochs == 0)
        throw Error(Errc::invalid_argument, "simulation needs at least one epoch");
    if (config.epochs_per_year == 0)
        throw Error(Errc::invalid_argument, "epochs per year must be at least 1");
    if (!(config.annual_inflation >= 0.0) || !std::isfinite(config.annual_inflation))
        throw Error(Errc::invalid_argument,
                    fmt::format("inflation must be finite and >= 0, got {}",
                                config.annual_inflation));
}

SimulationTrace run_compounding(const StakeSnapshot& snapshot, const SimulationConfig& config) {
    validate(config);
    const WeightScheme scheme = config.scheme.canonical();
    // Validates the initial weights (e.g. ln s on stakes below 2).
    const WeightVector initial = compute_weights(snapshot, scheme);
    const std::size_t m = snapshot.size();
    const double alpha = config.alpha();

    SimulationTrace trace;
    trace.scheme = scheme;
    trace.ids.reserve(m);
    std::vector<double> stakes(m);
    for (std::size_t k = 0; k < m; ++k) {
        trace.ids.push_back(snapshot.validators()[k].id);
        stakes[k] = to_double(snapshot.validators()[k].stake);
    }

    auto record = [&trace](const std::vector<double>& s) {
        trace.stakes.push_back(s);
        trace.gini.push_back(metrics::gini(s));
        trace.richest_median_ratio.push_back(richest_over_median(s));
    };
    record(stakes);

    std::vector<double> w(m);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        weigh(scheme, stakes, w);
        if (config.reward_mode == RewardMode::budget) {
            const double minted = alpha * kernels::sum(stakes);
            const double total_weight = kernels::sum(w);
            for (std::size_t k = 0; k < m; ++k)
                stakes[k] += minted * (w[k] / total_weight);
        } else {
            for (std::size_t k = 0; k < m; ++k)
                stakes[k] += alpha * w[k];
        }
        record(stakes);
    }

    trace.proposer_counts = sample_proposers(initial, config.proposer_rounds, config.seed);
    return trace;
}

std::vector<std::uint64_t> sample_proposers(const WeightVector& wv, std::size_t rounds,
                                            std::uint64_t seed) {
    const auto w = wv.weights();
    std::vector<std::uint64_t> counts(w.size(), 0);
    if (rounds == 0)
        return counts;

    std::vector<double> cumulative(w.size());
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    const double total = cumulative.back();

    std::mt19937_64 gen(seed);
    for (std::size_t r = 0; r < rounds; ++r) {
        // 53-bit uniform in [0, 1); avoids implementation-defined distributions.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * total);
        if (it == cumulative.end())
            --it;
        ++counts[static_cast<std::size_t>(it - cumulative.begin())];
    }
    return counts;
}

double top_decile_share(std::span<const std::uint64_t> counts) {
    if (counts.empty())
        return 0.0;
    const std::uint64_t rounds = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (rounds == 0)
        return 0.0;
    const std::size_t top = (counts.size() + 9) / 10;
    const std::uint64_t won =
        std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(top),
                        std::uint64_t{0});
    return static_cast<double>(won) / static_cast<double>(rounds);
}

} // namespace destake::sim
