#include "destake/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "destake/error.hpp"
#include "destake/kernels.hpp"

namespace destake::metrics {
namespace {

std::vector<double> sorted_ascending(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    if (!std::is_sorted(v.begin(), v.end()))
        std::sort(v.begin(), v.end());
    return v;
}

std::vector<double> sorted_descending(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    if (!std::is_sorted(v.begin(), v.end(), std::greater<>()))
        std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

} // namespace

double gini(std::span<const double> values) {
    if (values.empty())
        throw Error(Errc::empty_set, "gini of an empty set");
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(Errc::invalid_argument, "gini requires finite non-negative values");
    }
    const auto x = sorted_ascending(values);
    const double total = kernels::sum(x);
    if (total == 0.0 || x.front() == x.back())
        return 0.0;
    // sum_i sum_j |x_i - x_j| = 2 sum_i (2i - m - 1) x_(i) for ascending x.
    const double g = kernels::rank_weighted_sum(x) / (static_cast<double>(x.size()) * total);
    return std::max(0.0, g);
}

std::vector<std::pair<double, double>> lorenz_curve(std::span<const double> values) {
    if (values.empty())
        throw Error(Errc::empty_set, "lorenz curve of an empty set");
    const auto x = sorted_ascending(values);
    const double total = kernels::sum(x);
    const double m = static_cast<double>(x.size());
    std::vector<std::pair<double, double>> points;
    points.reserve(x.size() + 1);
    points.emplace_back(0.0, 0.0);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cumulative += x[i];
        points.emplace_back(static_cast<double>(i + 1) / m, total > 0.0 ? cumulative / total : 0.0);
    }
    points.back() = {1.0, 1.0};
    return points;
}

NakamotoCoefficient nakamoto(std::span<const double> weights, double total, unsigned num,
                             unsigned den) {
    if (weights.empty())
        throw Error(Errc::empty_set, "nakamoto coefficient of an empty set");
    const auto w = sorted_descending(weights);
    const double target = static_cast<double>(num) * total;
    double cumulative = 0.0;
    std::size_t count = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
        cumulative += w[i];
        if (static_cast<double>(den) * cumulative >= target) {
            count = i + 1;
            break;
        }
    }
    return {count, 100.0 * static_cast<double>(count) / static_cast<double>(w.size())};
}

NakamotoCoefficient nakamoto_liveness(const WeightVector& wv) {
    return nakamoto(wv.weights(), wv.total(), 1, 3);
}

NakamotoCoefficient nakamoto_safety(const WeightVector& wv) {
    return nakamoto(wv.weights(), wv.total(), 2, 3);
}

double hhi(const WeightVector& wv) {
    // Summing in canonical order makes the result independent of input order.
    const auto w = sorted_descending(wv.weights());
    const double total = kernels::sum(w);
    return kernels::sum_squares(w) / (total * total);
}

ZipfFit zipf_fit(std::span<const double> weights) {
    if (weights.size() < 2)
        throw Error(Errc::insufficient_points,
                    fmt::format("zipf fit needs at least 2 validators, got {}", weights.size()));
    const auto w = sorted_descending(weights);
    const std::size_t m = w.size();
    std::vector<double> x(m);
    std::vector<double> y(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (!(w[r] > 0.0))
            throw Error(Errc::non_positive_weight, "zipf fit requires positive weights");
        x[r] = std::log(static_cast<double>(r + 1));
        y[r] = std::log(w[r]);
    }
    const double mean_x = kernels::sum(x) / static_cast<double>(m);
    const double mean_y = kernels::sum(y) / static_cast<double>(m);
    const kernels::Moments mom = kernels::centered_moments(x, y, mean_x, mean_y);

    const double slope = mom.sxy / mom.sxx;
    ZipfFit fit;
    fit.exponent = std::max(0.0, -slope);
    if (mom.syy == 0.0)
        fit.r2 = 1.0;
    else
        fit.r2 = std::clamp((mom.sxy * mom.sxy) / (mom.sxx * mom.syy), 0.0, 1.0);
    return fit;
}

double epsilon_delta(const WeightVector& wv, double delta) {
    if (wv.size() == 0)
        throw Error(Errc::empty_set, "epsilon of an empty set");
    if (!(delta >= 0.0 && delta < 100.0))
        throw Error(Errc::invalid_argument,
                    fmt::format("delta must lie in [0, 100), got {}", delta));
    const auto w = sorted_ascending(wv.weights());
    const auto m = static_cast<double>(w.size());
    const auto index = static_cast<std::size_t>(std::floor(delta * (m - 1.0) / 100.0));
    const double ratio = w.back() / w[std::min(index, w.size() - 1)];
    return ratio - 1.0;
}

MetricsReport full_report(const StakeSnapshot& snapshot, const WeightScheme& scheme,
                          const ShapleyOptions& shapley) {
    const WeightVector wv = compute_weights(snapshot, scheme);

    MetricsReport report;
    report.chain = snapshot.chain();
    report.captured_at = snapshot.captured_at();
    report.scheme = wv.scheme();
    report.m = wv.size();
    report.gini = gini(wv);
    report.liveness = nakamoto_liveness(wv);
    report.safety = nakamoto_safety(wv);
    report.hhi = hhi(wv);
    if (wv.size() >= 2)
        report.zipf = zipf_fit(wv);
    report.epsilon_at[0] = epsilon_delta(wv, 0.0);
    report.epsilon_at[50] = epsilon_delta(wv, 50.0);

    if (shapley.mode != ShapleyMode::off) {
        const VotingGame live = VotingGame::liveness(wv, shapley.thresholds);
        const VotingGame safe = VotingGame::safety(wv, shapley.thresholds);
        ShapleySummary s;
        if (shapley.mode == ShapleyMode::exact) {
            s.method = ShapleyMethod::exact;
            s.liveness = shapley_exact(live, shapley.exact_limit);
            s.safety = shapley_exact(safe, shapley.exact_limit);
        } else {
            s.method = ShapleyMethod::sampled;
            s.samples = shapley.samples;
            s.seed = shapley.seed;
            s.liveness = shapley_sampled(live, shapley.samples, shapley.seed, shapley.threads);
            s.safety = shapley_sampled(safe, shapley.samples, shapley.seed, shapley.threads);
            s.std_error_max = std::max(s.liveness.std_error_max, s.safety.std_error_max);
        }
        s.gini_liveness = shapley_gini(s.liveness);
        s.gini_safety = shapley_gini(s.safety);
        s.stake_correlation_liveness = stake_shapley_correlation(wv, s.liveness);
        report.shapley = std::move(s);
    }
    return report;
}

} // namespace destake::metrics
