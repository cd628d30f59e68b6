#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "destake/coalition.hpp"
#include "destake/stake.hpp"

namespace destake::metrics {

/// Discrete Gini index, sum_i sum_j |x_i - x_j| / (2 m sum x), evaluated in
/// O(m log m) from the ascending order statistics. Values must be >= 0 (zeros
/// allowed, e.g. Shapley values); an all-zero input yields 0.
double gini(std::span<const double> values);
inline double gini(const WeightVector& wv) { return gini(wv.weights()); }

/// Points of the Lorenz curve from (0, 0) to (1, 1): cumulative validator share
/// against cumulative weight share, poorest first.
std::vector<std::pair<double, double>> lorenz_curve(std::span<const double> values);

struct NakamotoCoefficient {
    std::size_t count = 0; // validators in the smallest qualifying subset
    double percent = 0.0;  // 100 * count / m
};

/// Smallest subset with cumulative weight >= W/3.
NakamotoCoefficient nakamoto_liveness(const WeightVector& wv);
/// Smallest subset with cumulative weight >= 2W/3.
NakamotoCoefficient nakamoto_safety(const WeightVector& wv);

/// Greedy descending scan for the smallest subset reaching num/den of the total.
NakamotoCoefficient nakamoto(std::span<const double> weights, double total, unsigned num,
                             unsigned den);

/// Herfindahl-Hirschman index, sum (w_k / W)^2.
double hhi(const WeightVector& wv);

struct ZipfFit {
    double exponent = 0.0; // -slope, clamped at 0
    double r2 = 0.0;
};

/// OLS fit of ln w_r against ln r over all ranks (weights sorted descending).
/// Throws InsufficientPoints when m < 2.
ZipfFit zipf_fit(std::span<const double> weights);
inline ZipfFit zipf_fit(const WeightVector& wv) { return zipf_fit(wv.weights()); }

/// Disparity between the richest validator and the validator at the delta-th
/// percentile counted from the poorest: w_max / w_(delta) - 1, with index
/// floor(delta / 100 * (m - 1)) into the ascending order. delta in [0, 100).
double epsilon_delta(const WeightVector& wv, double delta);

struct ShapleySummary {
    ShapleyMethod method = ShapleyMethod::sampled;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double gini_liveness = 0.0;
    double gini_safety = 0.0;
    double std_error_max = 0.0;
    std::optional<double> stake_correlation_liveness;
    ShapleyResult liveness;
    ShapleyResult safety;
};

struct MetricsReport {
    std::string chain;
    std::optional<std::string> captured_at;
    WeightScheme scheme = WeightScheme::linear();
    std::size_t m = 0;
    double gini = 0.0;
    NakamotoCoefficient liveness;
    NakamotoCoefficient safety;
    double hhi = 0.0;
    std::optional<ZipfFit> zipf; // absent for m = 1
    std::map<int, double> epsilon_at; // delta -> epsilon, delta in {0, 50}
    std::optional<ShapleySummary> shapley;
};

enum class ShapleyMode { off, exact, sampled };

struct ShapleyOptions {
    ShapleyMode mode = ShapleyMode::sampled;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency
    std::size_t exact_limit = kDefaultExactLimit;
    ThresholdMode thresholds = ThresholdMode::exact_fraction;
};

MetricsReport full_report(const StakeSnapshot& snapshot, const WeightScheme& scheme,
                          const ShapleyOptions& shapley = {});

} // namespace destake::metrics
