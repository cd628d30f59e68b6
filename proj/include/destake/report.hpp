#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "destake/concentration.hpp"
#include "destake/reweighting.hpp"
#include "destake/simulator.hpp"

namespace destake::report {

enum class OutputFormat { table, csv, json };

std::optional<OutputFormat> parse_format(std::string_view name) noexcept;

// Columns of the comparison table, in display order.
enum class Metric { rho_liveness, rho_safety, gini, hhi, gini_phi_liveness, gini_phi_safety, zipf };
inline constexpr std::size_t kMetricCount = 7;
inline constexpr std::array<Metric, kMetricCount> kMetrics = {
    Metric::rho_liveness, Metric::rho_safety,        Metric::gini, Metric::hhi,
    Metric::gini_phi_liveness, Metric::gini_phi_safety, Metric::zipf};

std::string_view metric_key(Metric m) noexcept;   // json / csv key
std::string_view metric_title(Metric m) noexcept; // table header

/// Value of a metric in a report; absent when not computed (no Shapley, m = 1).
std::optional<double> metric_value(const metrics::MetricsReport& r, Metric m) noexcept;

/// Percent improvement over a baseline. Nakamoto percentages are better when
/// higher, (new - old) / old * 100; the rest are better when lower,
/// (old - new) / old * 100. A zero baseline yields 0.
double improvement(Metric m, double baseline, double value) noexcept;

using Improvements = std::array<std::optional<double>, kMetricCount>;

struct ComparisonRow {
    std::string chain;
    metrics::MetricsReport linear;
    metrics::MetricsReport srsw;
    metrics::MetricsReport lsw;
    Improvements srsw_gain{};
    Improvements lsw_gain{};
};

struct Violation {
    std::string chain;
    std::string scheme;
    Metric metric;
    double value;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows; // input order
    Improvements average_srsw{};
    Improvements average_lsw{};
    std::vector<Violation> violations; // negative improvements
};

/// Reports every snapshot under linear, srsw and lsw. Snapshots are processed
/// concurrently (`threads` workers, 0 = hardware concurrency); rows keep input
/// order and values do not depend on the worker count.
ComparisonReport compare(std::span<const StakeSnapshot> snapshots,
                         const metrics::ShapleyOptions& shapley, unsigned threads = 0);

std::string render(const metrics::MetricsReport& r, OutputFormat format);
std::string render(const ComparisonReport& r, OutputFormat format);
std::string render(const reweight::SybilAnalysis& a, OutputFormat format);

/// population_share,weight_share
std::string lorenz_csv(const WeightVector& wv);
/// id,weight,phi_liveness,phi_safety; needs a report carrying Shapley values.
std::string phi_csv(const StakeSnapshot& snapshot, const WeightVector& wv,
                    const metrics::ShapleySummary& shapley);
/// epoch,gini,richest_median_ratio
std::string trace_csv(const sim::SimulationTrace& trace);
/// id,count
std::string proposers_csv(const sim::SimulationTrace& trace);
/// Per-scheme summaries plus, when linear, srsw and lsw are all present, the
/// per-epoch check G_lsw <= G_srsw <= G_linear.
std::string simulation_summary_json(const sim::SimulationConfig& config,
                                    std::span<const sim::SimulationTrace> traces);

} // namespace destake::report
