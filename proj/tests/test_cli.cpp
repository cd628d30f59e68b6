#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "destake/cli.hpp"
#include "destake/ingest.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = DESTAKE_TEST_DATA_DIR;
const fs::path kGolden = DESTAKE_TEST_GOLDEN_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "destake");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = destake::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "destake_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_snapshot(const fs::path& dir, const std::string& chain,
                        const std::vector<destake::Stake>& stakes) {
    const fs::path p = dir / (chain + ".json");
    std::ofstream(p) << destake::ingest::to_json(destake::testing::snapshot_of(stakes, chain));
    return p;
}

std::vector<destake::Stake> power_law(double z, std::size_t m) {
    std::vector<destake::Stake> out;
    for (std::size_t r = 1; r <= m; ++r)
        out.push_back(static_cast<destake::Stake>(
            std::round(1e30L * std::pow(static_cast<long double>(r), -static_cast<long double>(z)))));
    return out;
}

void expect_golden(const std::string& name, const std::string& actual) {
    const fs::path p = kGolden / name;
    if (std::getenv("DESTAKE_UPDATE_GOLDEN")) {
        std::ofstream(p, std::ios::binary) << actual;
        return;
    }
    ASSERT_TRUE(fs::exists(p)) << p << " missing; rerun with DESTAKE_UPDATE_GOLDEN=1";
    EXPECT_EQ(actual, slurp(p)) << "golden mismatch for " << name;
}

} // namespace

TEST(CliAnalyze, UniformJson) {
    const auto dir = scratch("uniform");
    const auto path = write_snapshot(dir, "toy", std::vector<destake::Stake>(10, 1000));
    const auto r = run({"analyze", "--input", path.string(), "--scheme", "linear", "--format",
                        "json", "--shapley", "off"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["gini"].get<double>(), 0.0);
    EXPECT_NEAR(j["hhi"].get<double>(), 0.1, 1e-15);
    EXPECT_EQ(j["nakamoto_liveness_pct"].get<double>(), 40.0);
    EXPECT_EQ(j["nakamoto_safety_pct"].get<double>(), 70.0);
    EXPECT_EQ(j["scheme"]["name"], "linear");
    EXPECT_TRUE(j["shapley"].is_null());
}

TEST(CliAnalyze, PowerHalfIsSrsw) {
    const std::string in = (kData / "sample.csv").string();
    const auto a = run({"analyze", "-i", in, "--scheme", "power", "--exponent", "0.5", "--format",
                        "json", "--samples", "5000", "--seed", "3"});
    const auto b = run({"analyze", "-i", in, "--scheme", "srsw", "--format", "json", "--samples",
                        "5000", "--seed", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(CliAnalyze, Errors) {
    const auto missing = run({"analyze", "--input", "missing.json"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_NE(missing.err.find("missing.json"), std::string::npos) << missing.err;

    EXPECT_EQ(run({"analyze", "--input", (kData / "toy.json").string(), "--bogus"}).code, 2);
    EXPECT_EQ(run({"analyze", "--input", (kData / "toy.json").string(), "--scheme", "cubic"}).code, 2);
    EXPECT_EQ(run({"analyze", "--input", (kData / "toy.json").string(), "--scheme", "power"}).code, 2);
    EXPECT_EQ(run({"analyze", "--input", (kData / "toy.json").string(), "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"analyze", "--input", (kData / "toy.json").string(), "--samples", "10"}).code, 2);
    EXPECT_EQ(run({}).code, 2);

    const auto dir = scratch("errors");
    std::ofstream(dir / "bad.csv") << "id,stake\na,0\n";
    const auto zero = run({"analyze", "-i", (dir / "bad.csv").string()});
    EXPECT_EQ(zero.code, 1);
    EXPECT_NE(zero.err.find("'a'"), std::string::npos);

    const auto too_large = run({"analyze", "-i", write_snapshot(dir, "big", power_law(1, 25)).string(),
                                "--shapley", "exact"});
    EXPECT_EQ(too_large.code, 1);
}

TEST(CliAnalyze, ThreadCountDoesNotChangeOutput) {
    const std::string in = (kData / "sample.csv").string();
    const auto a = run({"analyze", "-i", in, "--format", "json", "--threads", "1", "--seed", "9",
                        "--samples", "20000"});
    const auto b = run({"analyze", "-i", in, "--format", "json", "--threads", "4", "--seed", "9",
                        "--samples", "20000"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(CliAnalyze, SeedFromEnvironment) {
    const std::string in = (kData / "sample.csv").string();
    const auto explicit_seed = run({"analyze", "-i", in, "--format", "json", "--seed", "77",
                                    "--samples", "3000"});
    ::setenv("DESTAKE_SEED", "77", 1);
    const auto from_env = run({"analyze", "-i", in, "--format", "json", "--samples", "3000"});
    ::setenv("DESTAKE_SEED", "x", 1);
    const auto bad = run({"analyze", "-i", in});
    ::unsetenv("DESTAKE_SEED");
    EXPECT_EQ(explicit_seed.out, from_env.out);
    EXPECT_EQ(json::parse(from_env.out)["shapley"]["seed"], 77);
    EXPECT_EQ(bad.code, 2);
}

TEST(CliAnalyze, Exports) {
    const auto dir = scratch("exports");
    const auto r = run({"analyze", "-i", (kData / "toy.json").string(), "--shapley", "exact",
                        "--lorenz-out", (dir / "l.csv").string(), "--phi-out",
                        (dir / "p.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "l.csv"), "population_share,weight_share\n0,0\n0.5,0.25\n1,1\n");
    EXPECT_EQ(slurp(dir / "p.csv"), "id,weight,phi_liveness,phi_safety\na,3,1,1\nb,1,0,0\n");

    const auto o = run({"analyze", "-i", (kData / "toy.json").string(), "--shapley", "off",
                        "--format", "csv", "--out-dir", (dir / "out").string()});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(fs::exists(dir / "out" / "toy_linear.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "toy_linear_lorenz.csv"));
}

TEST(CliAnalyze, MultipleInputsJsonArray) {
    const auto r = run({"analyze", "-i", (kData / "toy.json").string(), "-i",
                        (kData / "sample.csv").string(), "--format", "json", "--shapley", "off"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j[0]["chain"], "toy");
    EXPECT_EQ(j[1]["chain"], "sample");
}

TEST(CliGolden, AnalyzeTable) {
    const auto r = run({"analyze", "-i", (kData / "sample.csv").string(), "--scheme", "lsw",
                        "--shapley", "exact"});
    ASSERT_EQ(r.code, 0) << r.err;
    expect_golden("analyze_sample_lsw.txt", r.out);
}

TEST(CliGolden, CompareTable) {
    const auto r = run({"compare", "-i", (kData / "sample.csv").string(), "-i",
                        (kData / "toy.json").string(), "--shapley", "exact"});
    ASSERT_EQ(r.code, 0) << r.err;
    expect_golden("compare_exact.txt", r.out);
}

TEST(CliGolden, SybilTable) {
    const auto r = run({"sybil", "--stake", "100", "--parts", "4", "--scheme", "lsw"});
    ASSERT_EQ(r.code, 0) << r.err;
    expect_golden("sybil_lsw.txt", r.out);
}

TEST(CliCompare, PowerLawHalvesZipf) {
    const auto dir = scratch("compare");
    const auto path = write_snapshot(dir, "zipf2", power_law(2.0, 100));
    const auto r = run({"compare", "-i", path.string(), "--format", "json", "--shapley", "off"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["rows"][0]["improvement"]["srsw"]["zipf"].get<double>(), 50.0, 0.1);
    EXPECT_TRUE(j["violations"].empty());
    for (const auto& scheme : {"srsw", "lsw"})
        for (const auto& [key, v] : j["rows"][0]["improvement"][scheme].items()) {
            if (!v.is_null()) {
                EXPECT_GE(v.get<double>(), 0.0) << scheme << " " << key;
            }
        }
}

TEST(CliCompare, ConcurrentInputsKeepOrder) {
    const auto dir = scratch("order");
    std::vector<std::string> args = {"compare", "--format", "csv", "--samples", "2000"};
    for (int i = 0; i < 5; ++i) {
        args.push_back("-i");
        args.push_back(write_snapshot(dir, fmt::format("c{}", i), power_law(0.5 + i * 0.3, 30)).string());
    }
    auto serial = args;
    serial.push_back("--threads");
    serial.push_back("1");
    args.push_back("--threads");
    args.push_back("4");
    const auto a = run(args);
    const auto b = run(serial);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_LT(a.out.find("c0,srsw"), a.out.find("c4,srsw"));
}

TEST(CliSimulate, ZeroInflationAndDeterminism) {
    const std::string in = (kData / "sample.csv").string();
    const auto d1 = scratch("sim1");
    const auto d2 = scratch("sim2");
    const auto zero = run({"simulate", "-i", in, "--epochs", "1", "--inflation", "0", "--out-dir",
                           d1.string(), "--format", "json"});
    ASSERT_EQ(zero.code, 0) << zero.err;
    const auto summary = json::parse(slurp(d1 / "summary.json"));
    const auto snap = destake::ingest::parse_snapshot(in);
    for (const auto& s : summary["schemes"])
        for (std::size_t k = 0; k < snap.size(); ++k)
            EXPECT_EQ(s["final_stakes"][k].get<double>(), destake::to_double(snap.validators()[k].stake));

    for (const auto& d : {d1, d2})
        ASSERT_EQ(run({"simulate", "-i", in, "--epochs", "30", "--rounds", "5000", "--seed", "42",
                       "--out-dir", d.string()})
                      .code,
                  0);
    for (const auto& f : fs::directory_iterator(d1))
        EXPECT_EQ(slurp(f.path()), slurp(d2 / f.path().filename())) << f.path();
    EXPECT_TRUE(fs::exists(d1 / "trace_lsw.csv"));
    EXPECT_TRUE(fs::exists(d1 / "proposers_srsw.csv"));
}

TEST(CliSimulate, SummaryRecordsOrdering) {
    const auto dir = scratch("simorder");
    std::mt19937_64 rng(8);
    const auto path = write_snapshot(
        dir, "pareto", destake::testing::draw_stakes(rng, destake::testing::Family::pareto, 50));
    const auto r = run({"simulate", "-i", path.string(), "--epochs", "100", "--inflation", "0.09",
                        "--out-dir", (dir / "out").string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["gini_ordering"]["holds_every_epoch"].get<bool>());
    EXPECT_EQ(j["schemes"].size(), 3u);

    const auto single = run({"simulate", "-i", path.string(), "--scheme", "srsw", "--out-dir",
                             (dir / "one").string(), "--format", "json"});
    ASSERT_EQ(single.code, 0);
    EXPECT_TRUE(json::parse(single.out)["gini_ordering"].is_null());
    EXPECT_EQ(run({"simulate", "-i", path.string(), "--epochs", "0"}).code, 2);
}

TEST(CliSybil, Examples) {
    const auto a = run({"sybil", "--stake", "4", "--parts", "2", "--scheme", "srsw", "--alpha", "1",
                        "--format", "json"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NEAR(json::parse(a.out)["min_deterrent_cost"].get<double>(), 0.8284, 1e-4);

    const auto b = run({"sybil", "--stake", "1000", "--parts", "3", "--scheme", "linear", "--cost",
                        "0.01", "--format", "json"});
    ASSERT_EQ(b.code, 0);
    EXPECT_FALSE(json::parse(b.out)["rational_to_split"].get<bool>());

    EXPECT_EQ(run({"sybil", "--stake", "4", "--parts", "1"}).code, 2);
    EXPECT_EQ(run({"sybil", "--stake", "3", "--parts", "4"}).code, 2);
    EXPECT_EQ(run({"sybil", "--stake", "-4"}).code, 2);
    EXPECT_EQ(run({"sybil", "--stake", "4", "--alpha", "0"}).code, 2);
}
