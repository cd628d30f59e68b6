#include "destake/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "destake/concentration.hpp"
#include "destake/error.hpp"
#include "destake/ingest.hpp"
#include "destake/report.hpp"
#include "destake/reweighting.hpp"
#include "destake/simulator.hpp"

namespace destake::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemeArgs {
    std::string name = "linear";
    std::string exponent;
    bool lsw_no_offset = false;
};

struct ShapleyArgs {
    std::string mode = "sampled";
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool literal_thresholds = false;
};

struct InputArgs {
    std::vector<std::string> paths;
    std::string format; // empty = by extension
};

std::uint64_t default_seed() {
    const char* env = std::getenv("DESTAKE_SEED");
    if (env == nullptr || *env == '\0')
        return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used, 10);
        if (used != std::string_view(env).size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(fmt::format("DESTAKE_SEED must be a non-negative integer, got '{}'", env));
    }
}

void add_scheme_options(CLI::App& app, SchemeArgs& s, bool required_default) {
    auto* opt = app.add_option("--scheme", s.name, "Weight scheme: linear, srsw, lsw, power")
                    ->check(CLI::IsMember({"linear", "srsw", "lsw", "power"}));
    if (required_default)
        opt->capture_default_str();
    app.add_option("--exponent", s.exponent, "Exponent p of the power scheme, e.g. 0.5 or 1/3");
    app.add_flag("--lsw-no-offset", s.lsw_no_offset, "Use ln(s) instead of ln(1 + s) for lsw");
}

void add_shapley_options(CLI::App& app, ShapleyArgs& s) {
    app.add_option("--shapley", s.mode, "Shapley values: sampled, exact, off")
        ->check(CLI::IsMember({"sampled", "exact", "off"}))
        ->capture_default_str();
    app.add_option("--samples", s.samples, "Permutations for sampled Shapley values")
        ->capture_default_str();
    app.add_option("--seed", s.seed, "Sampling seed (default: $DESTAKE_SEED or 0)");
    app.add_option("--threads", s.threads, "Worker threads, 0 = all cores")->capture_default_str();
    app.add_flag("--literal-thresholds", s.literal_thresholds,
                 "Use 0.33 W and 0.66 W instead of W/3 and 2W/3 in the voting games");
}

void add_input_options(CLI::App& app, InputArgs& in, bool many) {
    auto* opt = app.add_option("--input,-i", in.paths, "Snapshot file (.json or .csv)")->required();
    if (!many)
        opt->expected(1);
    app.add_option("--input-format", in.format, "Override format detection: json, csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

WeightScheme make_scheme(const SchemeArgs& s) {
    std::optional<Rational> exponent;
    if (!s.exponent.empty()) {
        exponent = parse_rational(s.exponent);
        if (!exponent)
            throw UsageError(fmt::format("invalid exponent '{}'", s.exponent));
        if (s.name != "power")
            throw UsageError("--exponent only applies to --scheme power");
    }
    try {
        return parse_scheme(s.name, exponent, !s.lsw_no_offset);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

metrics::ShapleyOptions make_shapley(const ShapleyArgs& s) {
    metrics::ShapleyOptions o;
    o.mode = s.mode == "off"     ? metrics::ShapleyMode::off
             : s.mode == "exact" ? metrics::ShapleyMode::exact
                                 : metrics::ShapleyMode::sampled;
    o.samples = s.samples;
    o.seed = s.seed;
    o.threads = s.threads;
    o.thresholds = s.literal_thresholds ? ThresholdMode::literal : ThresholdMode::exact_fraction;
    if (o.mode == metrics::ShapleyMode::sampled && o.samples < kMinShapleySamples)
        throw UsageError(fmt::format("--samples must be at least {}", kMinShapleySamples));
    return o;
}

std::vector<StakeSnapshot> load(const InputArgs& in) {
    std::optional<ingest::Format> format;
    if (in.format == "json")
        format = ingest::Format::json;
    else if (in.format == "csv")
        format = ingest::Format::csv;
    std::vector<StakeSnapshot> out;
    out.reserve(in.paths.size());
    for (const auto& p : in.paths)
        out.push_back(ingest::parse_snapshot(p, format));
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f)
        throw Error(Errc::io_error, fmt::format("{}: cannot write file", path.string()));
}

std::string extension(report::OutputFormat f) {
    switch (f) {
    case report::OutputFormat::table: return "txt";
    case report::OutputFormat::csv: return "csv";
    case report::OutputFormat::json: return "json";
    }
    return "txt";
}

report::OutputFormat make_format(const std::string& name) {
    const auto f = report::parse_format(name);
    if (!f)
        throw UsageError(fmt::format("unknown output format '{}'", name));
    return *f;
}

std::string file_label(const WeightScheme& s) {
    std::string label = s.label();
    for (char& c : label)
        if (c == '(' || c == ')' || c == '/')
            c = '_';
    while (!label.empty() && label.back() == '_')
        label.pop_back();
    return label;
}

struct AnalyzeArgs {
    InputArgs input;
    SchemeArgs scheme;
    ShapleyArgs shapley;
    std::string format = "table";
    std::string out_dir;
    std::string lorenz_out;
    std::string phi_out;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto format = make_format(a.format);
    const WeightScheme scheme = make_scheme(a.scheme);
    const auto options = make_shapley(a.shapley);
    if ((!a.lorenz_out.empty() || !a.phi_out.empty()) && a.input.paths.size() != 1)
        throw UsageError("--lorenz-out and --phi-out need exactly one --input");
    if (!a.phi_out.empty() && options.mode == metrics::ShapleyMode::off)
        throw UsageError("--phi-out needs Shapley values (not --shapley off)");

    const auto snapshots = load(a.input);
    std::vector<metrics::MetricsReport> reports;
    for (const auto& snap : snapshots)
        reports.push_back(metrics::full_report(snap, scheme, options));

    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const WeightVector wv = compute_weights(snapshots[i], scheme);
        if (!a.lorenz_out.empty())
            write_file(a.lorenz_out, report::lorenz_csv(wv));
        if (!a.phi_out.empty())
            write_file(a.phi_out, report::phi_csv(snapshots[i], wv, *reports[i].shapley));
        if (!a.out_dir.empty()) {
            const fs::path base = fs::path(a.out_dir) /
                                  fmt::format("{}_{}", snapshots[i].chain(), file_label(scheme));
            write_file(base.string() + "." + extension(format), report::render(reports[i], format));
            write_file(base.string() + "_lorenz.csv", report::lorenz_csv(wv));
            if (reports[i].shapley)
                write_file(base.string() + "_phi.csv",
                           report::phi_csv(snapshots[i], wv, *reports[i].shapley));
        }
    }
    if (!a.out_dir.empty())
        return kExitOk;

    if (reports.size() == 1) {
        out << report::render(reports.front(), format);
    } else if (format == report::OutputFormat::json) {
        out << "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            std::string body = report::render(reports[i], format);
            body.pop_back();
            out << body << (i + 1 < reports.size() ? ",\n" : "\n");
        }
        out << "]\n";
    } else if (format == report::OutputFormat::csv) {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const std::string body = report::render(reports[i], format);
            out << (i == 0 ? body : body.substr(body.find('\n') + 1));
        }
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i)
            out << (i ? "\n" : "") << report::render(reports[i], format);
    }
    return kExitOk;
}

struct CompareArgs {
    InputArgs input;
    ShapleyArgs shapley;
    std::string format = "table";
    std::string out_dir;
    bool strict = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    const auto format = make_format(a.format);
    const auto options = make_shapley(a.shapley);
    const auto snapshots = load(a.input);
    const auto result = report::compare(snapshots, options, a.shapley.threads);
    const std::string text = report::render(result, format);
    if (a.out_dir.empty())
        out << text;
    else
        write_file(fs::path(a.out_dir) / ("compare." + extension(format)), text);
    for (const auto& v : result.violations)
        err << fmt::format("warning: negative improvement for {} ({}): {} = {:.6f}\n", v.chain,
                           v.scheme, report::metric_key(v.metric), v.value);
    return a.strict && !result.violations.empty() ? kExitDataError : kExitOk;
}

struct SimulateArgs {
    InputArgs input;
    SchemeArgs scheme;
    std::string format = "table";
    std::string out_dir = ".";
    std::size_t epochs = 100;
    double inflation = 0.045;
    std::size_t epochs_per_year = 1;
    std::size_t rounds = 0;
    std::uint64_t seed = 0;
    std::string reward_mode = "budget";
    bool scheme_given = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto format = make_format(a.format);
    sim::SimulationConfig config;
    config.epochs = a.epochs;
    config.annual_inflation = a.inflation;
    config.epochs_per_year = a.epochs_per_year;
    config.proposer_rounds = a.rounds;
    config.seed = a.seed;
    config.reward_mode =
        a.reward_mode == "per-weight" ? sim::RewardMode::per_weight : sim::RewardMode::budget;
    try {
        sim::validate(config);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    std::vector<WeightScheme> schemes;
    if (a.scheme_given)
        schemes.push_back(make_scheme(a.scheme));
    else
        schemes = {WeightScheme::linear(), WeightScheme::srsw(), WeightScheme::lsw()};

    const auto snapshots = load(a.input);
    const StakeSnapshot& snap = snapshots.front();
    std::vector<sim::SimulationTrace> traces;
    for (const auto& s : schemes) {
        config.scheme = s;
        traces.push_back(sim::run_compounding(snap, config));
    }

    const fs::path dir(a.out_dir);
    for (const auto& t : traces) {
        const std::string label = file_label(t.scheme);
        write_file(dir / fmt::format("trace_{}.csv", label), report::trace_csv(t));
        write_file(dir / fmt::format("proposers_{}.csv", label), report::proposers_csv(t));
    }
    config.scheme = schemes.front();
    const std::string summary = report::simulation_summary_json(config, traces);
    write_file(dir / "summary.json", summary);

    if (format == report::OutputFormat::json) {
        out << summary;
    } else if (format == report::OutputFormat::csv) {
        out << "scheme,initial_gini,final_gini,final_richest_median_ratio,top_decile_share\n";
        for (const auto& t : traces)
            out << fmt::format("{},{},{},{},{}\n", t.scheme.label(), t.gini.front(), t.gini.back(),
                               t.richest_median_ratio.back(),
                               sim::top_decile_share(t.proposer_counts));
    } else {
        out << fmt::format("{:<8}  {:>9}  {:>9}  {:>12}  {:>10}\n", "scheme", "G(0)",
                           fmt::format("G({})", config.epochs), "max/median", "top-10%");
        for (const auto& t : traces)
            out << fmt::format("{:<8}  {:>9.4f}  {:>9.4f}  {:>12.2f}  {:>10}\n", t.scheme.label(),
                               t.gini.front(), t.gini.back(), t.richest_median_ratio.back(),
                               a.rounds ? fmt::format("{:.4f}",
                                                      sim::top_decile_share(t.proposer_counts))
                                        : std::string("-"));
        out << fmt::format("wrote {} trace files and summary.json to {}\n", 2 * traces.size(),
                           dir.string());
    }
    return kExitOk;
}

struct SybilArgs {
    std::string stake;
    std::size_t parts = 2;
    SchemeArgs scheme{"srsw", "", false};
    double alpha = 1.0;
    double cost = 0.0;
    std::string format = "table";
};

int cmd_sybil(const SybilArgs& a, std::ostream& out) {
    const auto format = make_format(a.format);
    const auto stake = parse_stake(a.stake);
    if (!stake || *stake == 0)
        throw UsageError(fmt::format("--stake must be a positive integer, got '{}'", a.stake));
    if (!(a.cost >= 0.0))
        throw UsageError("--cost must be >= 0");
    reweight::RewardParams params;
    params.alpha = a.alpha;
    params.sybil_cost = a.cost;
    const WeightScheme scheme = make_scheme(a.scheme);
    try {
        out << report::render(reweight::sybil_split_analysis(*stake, a.parts, scheme, params),
                              format);
    } catch (const Error& e) {
        if (e.code() == Errc::invalid_split || e.code() == Errc::invalid_argument)
            throw UsageError(e.what());
        throw;
    }
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stake-weight decentralization metrics, reweighting and simulation", "destake"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    CompareArgs compare;
    SimulateArgs simulate;
    SybilArgs sybil;
    std::uint64_t seed = 0;
    try {
        seed = default_seed();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    analyze.shapley.seed = compare.shapley.seed = simulate.seed = seed;

    auto* a = app.add_subcommand("analyze", "Metrics for one weight scheme");
    add_input_options(*a, analyze.input, true);
    add_scheme_options(*a, analyze.scheme, true);
    add_shapley_options(*a, analyze.shapley);
    a->add_option("--format", analyze.format, "table, csv or json")->capture_default_str();
    a->add_option("--out-dir", analyze.out_dir, "Write reports and CSV exports here");
    a->add_option("--lorenz-out", analyze.lorenz_out, "Write the Lorenz curve CSV");
    a->add_option("--phi-out", analyze.phi_out, "Write per-validator Shapley values CSV");

    auto* c = app.add_subcommand("compare", "Improvement of srsw and lsw over linear weights");
    add_input_options(*c, compare.input, true);
    add_shapley_options(*c, compare.shapley);
    c->add_option("--format", compare.format, "table, csv or json")->capture_default_str();
    c->add_option("--out-dir", compare.out_dir, "Write the report here instead of stdout");
    c->add_flag("--strict", compare.strict, "Exit 1 when any improvement is negative");

    auto* s = app.add_subcommand("simulate", "Reward compounding and proposer selection");
    add_input_options(*s, simulate.input, false);
    add_scheme_options(*s, simulate.scheme, false);
    s->add_option("--epochs", simulate.epochs)->capture_default_str();
    s->add_option("--inflation", simulate.inflation, "Annual inflation rate")
        ->capture_default_str();
    s->add_option("--epochs-per-year", simulate.epochs_per_year)->capture_default_str();
    s->add_option("--rounds", simulate.rounds, "Block proposer draws")->capture_default_str();
    s->add_option("--seed", simulate.seed, "Proposer sampling seed");
    s->add_option("--reward-mode", simulate.reward_mode, "budget or per-weight")
        ->check(CLI::IsMember({"budget", "per-weight"}))
        ->capture_default_str();
    s->add_option("--format", simulate.format, "table, csv or json")->capture_default_str();
    s->add_option("--out-dir", simulate.out_dir, "Directory for trace files")
        ->capture_default_str();

    auto* y = app.add_subcommand("sybil", "Stake-splitting incentive analysis");
    y->add_option("--stake", sybil.stake, "Total stake S in base units")->required();
    y->add_option("--parts", sybil.parts, "Number of identities n")->capture_default_str();
    add_scheme_options(*y, sybil.scheme, true);
    y->add_option("--alpha", sybil.alpha, "Per-epoch inflation factor")->capture_default_str();
    y->add_option("--cost", sybil.cost, "Cost C per additional identity")->capture_default_str();
    y->add_option("--format", sybil.format, "table, csv or json")->capture_default_str();

    for (auto* sub : {a, c, s, y})
        sub->get_option("--format")->check(CLI::IsMember({"table", "csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }
    simulate.scheme_given = s->count("--scheme") > 0;

    try {
        if (a->parsed())
            return cmd_analyze(analyze, out);
        if (c->parsed())
            return cmd_compare(compare, out, err);
        if (s->parsed())
            return cmd_simulate(simulate, out);
        return cmd_sybil(sybil, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}

} // namespace destake::cli
