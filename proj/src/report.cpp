#include "destake/report.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "destake/error.hpp"

namespace destake::report {
namespace {

using nlohmann::ordered_json;

// Slack for the per-epoch Gini ordering check; equal stakes give equal Gini
// exactly, so this only absorbs summation noise.
constexpr double kOrderingSlack = 1e-12;

std::string_view method_name(ShapleyMethod m) {
    return m == ShapleyMethod::exact ? "exact" : "sampled";
}

ordered_json scheme_json(const WeightScheme& s) {
    ordered_json j;
    j["name"] = s.label();
    if (s.kind() == SchemeKind::power)
        j["exponent"] = format_rational(s.exponent());
    if (s.kind() == SchemeKind::lsw)
        j["offset"] = s.lsw_offset();
    return j;
}

template <class T>
ordered_json optional_json(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json report_json(const metrics::MetricsReport& r) {
    ordered_json j;
    j["chain"] = r.chain;
    j["captured_at"] = optional_json(r.captured_at);
    j["scheme"] = scheme_json(r.scheme);
    j["m"] = r.m;
    j["gini"] = r.gini;
    j["nakamoto_liveness_count"] = r.liveness.count;
    j["nakamoto_liveness_pct"] = r.liveness.percent;
    j["nakamoto_safety_count"] = r.safety.count;
    j["nakamoto_safety_pct"] = r.safety.percent;
    j["hhi"] = r.hhi;
    j["zipf"] = r.zipf ? ordered_json(r.zipf->exponent) : ordered_json(nullptr);
    j["zipf_r2"] = r.zipf ? ordered_json(r.zipf->r2) : ordered_json(nullptr);
    ordered_json eps = ordered_json::object();
    for (const auto& [delta, value] : r.epsilon_at)
        eps[std::to_string(delta)] = value;
    j["epsilon_at"] = eps;
    if (r.shapley) {
        const auto& s = *r.shapley;
        ordered_json sj;
        sj["method"] = method_name(s.method);
        if (s.method == ShapleyMethod::sampled) {
            sj["samples"] = s.samples;
            sj["seed"] = s.seed;
            sj["std_error_max"] = s.std_error_max;
        }
        sj["gini_liveness"] = s.gini_liveness;
        sj["gini_safety"] = s.gini_safety;
        sj["stake_correlation_liveness"] = optional_json(s.stake_correlation_liveness);
        j["shapley"] = sj;
    } else {
        j["shapley"] = nullptr;
    }
    return j;
}

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }
std::string full(double v) { return fmt::format("{}", v); }
std::string opt_full(const std::optional<double>& v) { return v ? full(*v) : std::string(); }

// Two-column key/value table with the keys padded to a common width.
std::string kv_table(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t width = 0;
    for (const auto& [k, v] : rows)
        width = std::max(width, k.size());
    std::string out;
    for (const auto& [k, v] : rows)
        out += fmt::format("{:<{}}  {}\n", k, width, v);
    return out;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string render_table(const metrics::MetricsReport& r) {
    std::vector<std::pair<std::string, std::string>> rows = {
        {"chain", r.chain},
        {"captured_at", r.captured_at.value_or("-")},
        {"scheme", r.scheme.label()},
        {"validators", std::to_string(r.m)},
        {"G", fixed2(r.gini)},
        {"N_L", fmt::format("{} ({}%)", r.liveness.count, fixed2(r.liveness.percent))},
        {"N_S", fmt::format("{} ({}%)", r.safety.count, fixed2(r.safety.percent))},
        {"HHI", fmt::format("{:.3f}", r.hhi)},
        {"Z", r.zipf ? fmt::format("{} (r2 {})", fixed2(r.zipf->exponent), fixed2(r.zipf->r2))
                     : std::string("-")},
    };
    for (const auto& [delta, value] : r.epsilon_at)
        rows.emplace_back(fmt::format("eps(delta={})", delta), fmt::format("{:.4g}", value));
    if (r.shapley) {
        const auto& s = *r.shapley;
        rows.emplace_back("G_phiL", fixed2(s.gini_liveness));
        rows.emplace_back("G_phiS", fixed2(s.gini_safety));
        rows.emplace_back("corr(w, phiL)", s.stake_correlation_liveness
                                               ? fmt::format("{:.4f}", *s.stake_correlation_liveness)
                                               : std::string("undefined"));
        if (s.method == ShapleyMethod::sampled)
            rows.emplace_back("shapley", fmt::format("sampled, {} samples, seed {}, max se {:.4f}",
                                                     s.samples, s.seed, s.std_error_max));
        else
            rows.emplace_back("shapley", "exact");
    }
    return kv_table(rows);
}

constexpr std::string_view kReportCsvHeader =
    "chain,scheme,m,gini,nakamoto_liveness_count,nakamoto_liveness_pct,nakamoto_safety_count,"
    "nakamoto_safety_pct,hhi,zipf,zipf_r2,epsilon_0,epsilon_50,gini_phi_liveness,"
    "gini_phi_safety,stake_correlation_liveness";

std::string report_csv_row(const metrics::MetricsReport& r) {
    auto eps = [&](int d) {
        const auto it = r.epsilon_at.find(d);
        return it == r.epsilon_at.end() ? std::string() : full(it->second);
    };
    std::string phi_l, phi_s, corr;
    if (r.shapley) {
        phi_l = full(r.shapley->gini_liveness);
        phi_s = full(r.shapley->gini_safety);
        corr = opt_full(r.shapley->stake_correlation_liveness);
    }
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.chain),
                       r.scheme.label(), r.m, full(r.gini), r.liveness.count,
                       full(r.liveness.percent), r.safety.count, full(r.safety.percent),
                       full(r.hhi), r.zipf ? full(r.zipf->exponent) : "",
                       r.zipf ? full(r.zipf->r2) : "", eps(0), eps(50), phi_l, phi_s, corr);
}

ordered_json improvements_json(const Improvements& imp) {
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < kMetricCount; ++i)
        j[std::string(metric_key(kMetrics[i]))] = optional_json(imp[i]);
    return j;
}

Improvements gains(const metrics::MetricsReport& base, const metrics::MetricsReport& other) {
    Improvements out{};
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        const auto b = metric_value(base, kMetrics[i]);
        const auto v = metric_value(other, kMetrics[i]);
        if (b && v)
            out[i] = improvement(kMetrics[i], *b, *v);
    }
    return out;
}

Improvements average(const std::vector<ComparisonRow>& rows, Improvements ComparisonRow::*field) {
    Improvements out{};
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& row : rows) {
            if (const auto& v = (row.*field)[i]) {
                sum += *v;
                ++n;
            }
        }
        if (n > 0)
            out[i] = sum / static_cast<double>(n);
    }
    return out;
}

std::string comparison_table(const ComparisonReport& r) {
    std::vector<bool> present(kMetricCount, false);
    for (std::size_t i = 0; i < kMetricCount; ++i)
        present[i] = r.average_srsw[i].has_value() || r.average_lsw[i].has_value();

    auto cell = [](const std::optional<double>& s, const std::optional<double>& l) {
        auto one = [](const std::optional<double>& v) { return v ? fixed2(*v) : std::string("-"); };
        return fmt::format("{} / {}", one(s), one(l));
    };

    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> header = {"chain"};
    for (std::size_t i = 0; i < kMetricCount; ++i)
        if (present[i])
            header.emplace_back(metric_title(kMetrics[i]));
    lines.push_back(header);
    auto add = [&](const std::string& name, const Improvements& s, const Improvements& l) {
        std::vector<std::string> line = {name};
        for (std::size_t i = 0; i < kMetricCount; ++i)
            if (present[i])
                line.push_back(cell(s[i], l[i]));
        lines.push_back(std::move(line));
    };
    for (const auto& row : r.rows)
        add(row.chain, row.srsw_gain, row.lsw_gain);
    add("Average", r.average_srsw, r.average_lsw);

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : lines)
        for (std::size_t c = 0; c < line.size(); ++c)
            width[c] = std::max(width[c], line[c].size());

    std::string out = "Improvement over linear, % (srsw / lsw)\n";
    for (const auto& line : lines) {
        std::string text;
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c == 0)
                text += fmt::format("{:<{}}", line[c], width[c]);
            else
                text += fmt::format("  {:>{}}", line[c], width[c]);
        }
        out += text + "\n";
    }
    for (const auto& v : r.violations)
        out += fmt::format("violation: {} {} {} = {:.4f}\n", v.chain, v.scheme,
                           metric_key(v.metric), v.value);
    return out;
}

std::string comparison_csv(const ComparisonReport& r) {
    std::string out = "chain,scheme";
    for (Metric m : kMetrics)
        out += fmt::format(",{}", metric_key(m));
    out += '\n';
    auto add = [&](std::string_view chain, std::string_view scheme, const Improvements& imp) {
        out += fmt::format("{},{}", csv_field(chain), scheme);
        for (const auto& v : imp)
            out += "," + opt_full(v);
        out += '\n';
    };
    for (const auto& row : r.rows) {
        add(row.chain, "srsw", row.srsw_gain);
        add(row.chain, "lsw", row.lsw_gain);
    }
    add("average", "srsw", r.average_srsw);
    add("average", "lsw", r.average_lsw);
    return out;
}

ordered_json comparison_json(const ComparisonReport& r) {
    ordered_json j;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json rj;
        rj["chain"] = row.chain;
        rj["linear"] = report_json(row.linear);
        rj["srsw"] = report_json(row.srsw);
        rj["lsw"] = report_json(row.lsw);
        rj["improvement"] = {{"srsw", improvements_json(row.srsw_gain)},
                             {"lsw", improvements_json(row.lsw_gain)}};
        rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    j["average"] = {{"srsw", improvements_json(r.average_srsw)},
                    {"lsw", improvements_json(r.average_lsw)}};
    ordered_json violations = ordered_json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"chain", v.chain},
                              {"scheme", v.scheme},
                              {"metric", metric_key(v.metric)},
                              {"value", v.value}});
    j["violations"] = std::move(violations);
    return j;
}

} // namespace

std::optional<OutputFormat> parse_format(std::string_view name) noexcept {
    if (name == "table") return OutputFormat::table;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    return std::nullopt;
}

std::string_view metric_key(Metric m) noexcept {
    switch (m) {
    case Metric::rho_liveness: return "nakamoto_liveness_pct";
    case Metric::rho_safety: return "nakamoto_safety_pct";
    case Metric::gini: return "gini";
    case Metric::hhi: return "hhi";
    case Metric::gini_phi_liveness: return "gini_phi_liveness";
    case Metric::gini_phi_safety: return "gini_phi_safety";
    case Metric::zipf: return "zipf";
    }
    return "";
}

std::string_view metric_title(Metric m) noexcept {
    switch (m) {
    case Metric::rho_liveness: return "rho_NL";
    case Metric::rho_safety: return "rho_NS";
    case Metric::gini: return "G";
    case Metric::hhi: return "HHI";
    case Metric::gini_phi_liveness: return "G_phiL";
    case Metric::gini_phi_safety: return "G_phiS";
    case Metric::zipf: return "Z";
    }
    return "";
}

std::optional<double> metric_value(const metrics::MetricsReport& r, Metric m) noexcept {
    switch (m) {
    case Metric::rho_liveness: return r.liveness.percent;
    case Metric::rho_safety: return r.safety.percent;
    case Metric::gini: return r.gini;
    case Metric::hhi: return r.hhi;
    case Metric::gini_phi_liveness:
        return r.shapley ? std::optional<double>(r.shapley->gini_liveness) : std::nullopt;
    case Metric::gini_phi_safety:
        return r.shapley ? std::optional<double>(r.shapley->gini_safety) : std::nullopt;
    case Metric::zipf:
        return r.zipf ? std::optional<double>(r.zipf->exponent) : std::nullopt;
    }
    return std::nullopt;
}

double improvement(Metric m, double baseline, double value) noexcept {
    if (baseline == 0.0)
        return 0.0;
    const bool higher_is_better = m == Metric::rho_liveness || m == Metric::rho_safety;
    const double delta = higher_is_better ? value - baseline : baseline - value;
    return delta / baseline * 100.0;
}

ComparisonReport compare(std::span<const StakeSnapshot> snapshots,
                         const metrics::ShapleyOptions& shapley, unsigned threads) {
    if (snapshots.empty())
        throw Error(Errc::empty_set, "compare needs at least one snapshot");
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    auto one = [&shapley](const StakeSnapshot& snap) {
        ComparisonRow row;
        row.chain = snap.chain();
        row.linear = metrics::full_report(snap, WeightScheme::linear(), shapley);
        row.srsw = metrics::full_report(snap, WeightScheme::srsw(), shapley);
        row.lsw = metrics::full_report(snap, WeightScheme::lsw(), shapley);
        row.srsw_gain = gains(row.linear, row.srsw);
        row.lsw_gain = gains(row.linear, row.lsw);
        return row;
    };

    ComparisonReport report;
    report.rows.resize(snapshots.size());
    // Batches of `threads` snapshots; each row lands in its input slot.
    for (std::size_t begin = 0; begin < snapshots.size(); begin += threads) {
        const std::size_t end = std::min(snapshots.size(), begin + threads);
        if (end - begin == 1) {
            report.rows[begin] = one(snapshots[begin]);
            continue;
        }
        std::vector<std::future<ComparisonRow>> pending;
        for (std::size_t i = begin; i < end; ++i)
            pending.push_back(std::async(std::launch::async, one, std::cref(snapshots[i])));
        for (std::size_t i = begin; i < end; ++i)
            report.rows[i] = pending[i - begin].get();
    }

    report.average_srsw = average(report.rows, &ComparisonRow::srsw_gain);
    report.average_lsw = average(report.rows, &ComparisonRow::lsw_gain);
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            if (row.srsw_gain[i] && *row.srsw_gain[i] < 0.0)
                report.violations.push_back({row.chain, "srsw", kMetrics[i], *row.srsw_gain[i]});
            if (row.lsw_gain[i] && *row.lsw_gain[i] < 0.0)
                report.violations.push_back({row.chain, "lsw", kMetrics[i], *row.lsw_gain[i]});
        }
    }
    return report;
}

std::string render(const metrics::MetricsReport& r, OutputFormat format) {
    switch (format) {
    case OutputFormat::table: return render_table(r);
    case OutputFormat::csv: return std::string(kReportCsvHeader) + "\n" + report_csv_row(r);
    case OutputFormat::json: return report_json(r).dump(2) + "\n";
    }
    return {};
}

std::string render(const ComparisonReport& r, OutputFormat format) {
    switch (format) {
    case OutputFormat::table: return comparison_table(r);
    case OutputFormat::csv: return comparison_csv(r);
    case OutputFormat::json: return comparison_json(r).dump(2) + "\n";
    }
    return {};
}

std::string render(const reweight::SybilAnalysis& a, OutputFormat format) {
    switch (format) {
    case OutputFormat::table:
        return kv_table({
            {"stake", format_stake(a.stake)},
            {"parts", std::to_string(a.parts)},
            {"scheme", a.scheme.label()},
            {"single_reward", fmt::format("{:.4f}", a.single_reward)},
            {"split_reward", fmt::format("{:.4f}", a.split_reward)},
            {"min_deterrent_cost", fmt::format("{:.4f}", a.min_deterrent_cost)},
            {"reference_bound",
             a.reference_bound ? fmt::format("{:.4f}", *a.reference_bound) : std::string("-")},
            {"rational_to_split", a.rational_to_split ? "true" : "false"},
        });
    case OutputFormat::csv:
        return fmt::format("stake,parts,scheme,single_reward,split_reward,min_deterrent_cost,"
                           "reference_bound,rational_to_split\n{},{},{},{},{},{},{},{}\n",
                           format_stake(a.stake), a.parts, a.scheme.label(),
                           full(a.single_reward), full(a.split_reward),
                           full(a.min_deterrent_cost), opt_full(a.reference_bound),
                           a.rational_to_split ? "true" : "false");
    case OutputFormat::json: {
        ordered_json j;
        j["stake"] = format_stake(a.stake);
        j["parts"] = a.parts;
        j["scheme"] = scheme_json(a.scheme);
        j["single_reward"] = a.single_reward;
        j["split_reward"] = a.split_reward;
        j["min_deterrent_cost"] = a.min_deterrent_cost;
        j["reference_bound"] = optional_json(a.reference_bound);
        j["rational_to_split"] = a.rational_to_split;
        return j.dump(2) + "\n";
    }
    }
    return {};
}

std::string lorenz_csv(const WeightVector& wv) {
    std::string out = "population_share,weight_share\n";
    for (const auto& [p, w] : metrics::lorenz_curve(wv.weights()))
        out += fmt::format("{},{}\n", p, w);
    return out;
}

std::string phi_csv(const StakeSnapshot& snapshot, const WeightVector& wv,
                    const metrics::ShapleySummary& shapley) {
    std::string out = "id,weight,phi_liveness,phi_safety\n";
    const auto validators = snapshot.validators();
    for (std::size_t k = 0; k < validators.size(); ++k)
        out += fmt::format("{},{},{},{}\n", csv_field(validators[k].id), wv[k],
                           shapley.liveness.values[k], shapley.safety.values[k]);
    return out;
}

std::string trace_csv(const sim::SimulationTrace& trace) {
    std::string out = "epoch,gini,richest_median_ratio\n";
    for (std::size_t t = 0; t < trace.gini.size(); ++t)
        out += fmt::format("{},{},{}\n", t, trace.gini[t], trace.richest_median_ratio[t]);
    return out;
}

std::string proposers_csv(const sim::SimulationTrace& trace) {
    std::string out = "id,count\n";
    for (std::size_t k = 0; k < trace.ids.size(); ++k)
        out += fmt::format("{},{}\n", csv_field(trace.ids[k]),
                           k < trace.proposer_counts.size() ? trace.proposer_counts[k] : 0);
    return out;
}

std::string simulation_summary_json(const sim::SimulationConfig& config,
                                    std::span<const sim::SimulationTrace> traces) {
    ordered_json j;
    j["config"] = {
        {"epochs", config.epochs},
        {"annual_inflation", config.annual_inflation},
        {"epochs_per_year", config.epochs_per_year},
        {"alpha", config.alpha()},
        {"proposer_rounds", config.proposer_rounds},
        {"seed", config.seed},
        {"reward_mode", config.reward_mode == sim::RewardMode::budget ? "budget" : "per-weight"},
    };

    const sim::SimulationTrace* by_kind[3] = {nullptr, nullptr, nullptr};
    ordered_json schemes = ordered_json::array();
    for (const auto& t : traces) {
        ordered_json s;
        s["scheme"] = scheme_json(t.scheme);
        s["initial_gini"] = t.gini.front();
        s["final_gini"] = t.gini.back();
        s["final_richest_median_ratio"] = t.richest_median_ratio.back();
        s["final_stakes"] = t.stakes.back();
        s["gini"] = t.gini;
        s["richest_median_ratio"] = t.richest_median_ratio;
        s["proposer_top_decile_share"] = sim::top_decile_share(t.proposer_counts);
        schemes.push_back(std::move(s));
        if (t.scheme == WeightScheme::linear()) by_kind[0] = &t;
        if (t.scheme == WeightScheme::srsw()) by_kind[1] = &t;
        if (t.scheme == WeightScheme::lsw()) by_kind[2] = &t;
    }
    j["schemes"] = std::move(schemes);

    if (by_kind[0] && by_kind[1] && by_kind[2]) {
        std::vector<std::size_t> violating;
        const std::size_t n = by_kind[0]->gini.size();
        for (std::size_t t = 0; t < n; ++t) {
            const double lin = by_kind[0]->gini[t];
            const double sq = by_kind[1]->gini[t];
            const double lg = by_kind[2]->gini[t];
            if (lg > sq + kOrderingSlack || sq > lin + kOrderingSlack)
                violating.push_back(t);
        }
        j["gini_ordering"] = {{"relation", "lsw <= srsw <= linear"},
                              {"holds_every_epoch", violating.empty()},
                              {"violating_epochs", violating}};
    } else {
        j["gini_ordering"] = nullptr;
    }
    return j.dump(2) + "\n";
}

} // namespace destake::report
