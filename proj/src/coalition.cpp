#include "destake/coalition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "destake/concentration.hpp"
#include "destake/error.hpp"
#include "destake/kernels.hpp"

namespace destake {
namespace {

// SplitMix64 finalizer; also used as a counter-based stream.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class PermutationStream {
public:
    PermutationStream(std::uint64_t seed, std::uint64_t index) noexcept
        : state_(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(index + 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Unbiased integer in [0, bound), Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ using u128 = unsigned __int128;
        u128 product = static_cast<u128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t floor = (0 - bound) % bound;
            while (low < floor) {
                product = static_cast<u128>(next()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

private:
    std::uint64_t state_;
};

void count_pivots(const VotingGame& game, std::uint64_t seed, std::size_t begin,
                  std::size_t end, std::vector<std::uint64_t>& counts) {
    const auto w = game.weights();
    const std::size_t m = w.size();
    std::vector<std::uint32_t> order(m);
    for (std::size_t j = begin; j < end; ++j) {
        std::iota(order.begin(), order.end(), 0u);
        PermutationStream rng(seed, j);
        double cumulative = 0.0;
        // Lazy Fisher-Yates: only the prefix up to the pivot is ever drawn.
        for (std::size_t pos = 0; pos < m; ++pos) {
            const std::size_t pick = pos + static_cast<std::size_t>(rng.below(m - pos));
            std::swap(order[pos], order[pick]);
            const std::uint32_t k = order[pos];
            cumulative += w[k];
            if (game.wins(cumulative)) {
                ++counts[k];
                break;
            }
        }
    }
}

} // namespace

VotingGame::VotingGame(const WeightVector& weights, std::uint32_t num, std::uint32_t den,
                       Strictness strictness)
    : weights_(weights.weights().begin(), weights.weights().end()),
      total_(weights.total()),
      num_(num),
      den_(den),
      strictness_(strictness) {
    if (den == 0 || num >= den)
        throw Error(Errc::invalid_argument,
                    fmt::format("threshold fraction {}/{} must lie in [0, 1)", num, den));
}

VotingGame VotingGame::liveness(const WeightVector& weights, ThresholdMode mode) {
    return mode == ThresholdMode::exact_fraction ? VotingGame(weights, 1, 3)
                                                 : VotingGame(weights, 33, 100);
}

VotingGame VotingGame::safety(const WeightVector& weights, ThresholdMode mode) {
    return mode == ThresholdMode::exact_fraction ? VotingGame(weights, 2, 3)
                                                 : VotingGame(weights, 66, 100);
}

VotingGame VotingGame::of(GameKind kind, const WeightVector& weights, ThresholdMode mode) {
    return kind == GameKind::liveness ? liveness(weights, mode) : safety(weights, mode);
}

ShapleyResult shapley_exact(const VotingGame& game, std::size_t exact_limit) {
    const std::size_t m = game.size();
    exact_limit = std::min<std::size_t>(exact_limit, kDefaultExactLimit);
    if (m > exact_limit)
        throw Error(Errc::too_large,
                    fmt::format("exact Shapley values limited to {} validators, got {}",
                                exact_limit, m));
    const auto w = game.weights();

    // coeff[s] = s! (m - s - 1)!, the number of orders in which a fixed
    // coalition of size s precedes the player. Summed over players it is m!.
    std::vector<std::int64_t> factorial(m + 1, 1);
    for (std::size_t i = 1; i <= m; ++i)
        factorial[i] = factorial[i - 1] * static_cast<std::int64_t>(i);
    std::vector<std::int64_t> coeff(m);
    for (std::size_t s = 0; s < m; ++s)
        coeff[s] = factorial[s] * factorial[m - s - 1];

    const std::size_t subsets = std::size_t{1} << m;
    std::vector<double> weight_of(subsets, 0.0);
    std::vector<std::uint8_t> wins(subsets, 0);
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        const auto low = static_cast<std::size_t>(std::countr_zero(mask));
        weight_of[mask] = weight_of[mask & (mask - 1)] + w[low];
        wins[mask] = game.wins(weight_of[mask]) ? 1 : 0;
    }

    std::vector<std::int64_t> numerators(m, 0);
    for (std::size_t mask = 0; mask + 1 < subsets; ++mask) {
        const std::int64_t c = coeff[static_cast<std::size_t>(std::popcount(mask))];
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t bit = std::size_t{1} << k;
            if (mask & bit)
                continue;
            const int marginal = int{wins[mask | bit]} - int{wins[mask]};
            if (marginal != 0)
                numerators[k] += marginal * c;
        }
    }

    ShapleyResult result;
    result.method = ShapleyMethod::exact;
    result.denominator = factorial[m];
    result.values.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        result.values[k] =
            static_cast<double>(numerators[k]) / static_cast<double>(result.denominator);
    result.numerators = std::move(numerators);
    return result;
}

ShapleyResult shapley_sampled(const VotingGame& game, std::size_t samples, std::uint64_t seed,
                              unsigned threads) {
    if (samples < kMinShapleySamples)
        throw Error(Errc::insufficient_samples,
                    fmt::format("sampled Shapley values need at least {} samples, got {}",
                                kMinShapleySamples, samples));
    const std::size_t m = game.size();
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));

    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(m, 0));
    if (threads == 1) {
        count_pivots(game, seed, 0, samples, partial[0]);
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = samples * t / threads;
            const std::size_t end = samples * (t + 1) / threads;
            workers.emplace_back([&, t, begin, end] {
                count_pivots(game, seed, begin, end, partial[t]);
            });
        }
    }

    ShapleyResult result;
    result.method = ShapleyMethod::sampled;
    result.samples = samples;
    result.seed = seed;
    result.pivot_counts.assign(m, 0);
    for (const auto& p : partial)
        for (std::size_t k = 0; k < m; ++k)
            result.pivot_counts[k] += p[k];

    result.values.resize(m);
    const auto n = static_cast<double>(samples);
    for (std::size_t k = 0; k < m; ++k) {
        const double phi = static_cast<double>(result.pivot_counts[k]) / n;
        result.values[k] = phi;
        result.std_error_max = std::max(result.std_error_max, std::sqrt(phi * (1.0 - phi) / n));
    }
    return result;
}

double shapley_gini(const ShapleyResult& result) { return metrics::gini(result.values); }

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(Errc::invalid_argument,
                    fmt::format("correlation needs equal lengths ({} vs {})", x.size(), y.size()));
    if (x.empty())
        throw Error(Errc::empty_set, "correlation of empty series");
    auto constant = [](std::span<const double> v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi;
    };
    if (constant(x) || constant(y))
        return std::nullopt;
    const auto n = static_cast<double>(x.size());
    const double mean_x = kernels::sum(x) / n;
    const double mean_y = kernels::sum(y) / n;
    const kernels::Moments mom = kernels::centered_moments(x, y, mean_x, mean_y);
    if (mom.sxx == 0.0 || mom.syy == 0.0)
        return std::nullopt;
    return std::clamp(mom.sxy / std::sqrt(mom.sxx * mom.syy), -1.0, 1.0);
}

std::optional<double> stake_shapley_correlation(const WeightVector& wv,
                                                const ShapleyResult& result) {
    return pearson(wv.weights(), result.values);
}

} // namespace destake
