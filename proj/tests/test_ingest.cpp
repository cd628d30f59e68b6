#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "destake/error.hpp"
#include "destake/ingest.hpp"
#include "support.hpp"

using namespace destake;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToyJson =
    R"({"chain":"toy","captured_at":"2024-10-25T00:00:00Z","validators":[{"id":"a","stake":"3"},{"id":"b","stake":"1"}]})";

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::io_error;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "destake_ingest_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

} // namespace

TEST(Ingest, ParsesJsonExample) {
    const auto s = ingest::parse_json(kToyJson);
    EXPECT_EQ(s.chain(), "toy");
    EXPECT_EQ(s.captured_at(), "2024-10-25T00:00:00Z");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.validators()[0].id, "a");
    EXPECT_EQ(s.validators()[1].id, "b");
}

TEST(Ingest, CsvMatchesJson) {
    const auto csv = ingest::parse_csv("id,stake\nb,1\na,3\n", "toy");
    const auto json = ingest::parse_json(kToyJson);
    EXPECT_EQ(csv.validators().size(), json.validators().size());
    for (std::size_t i = 0; i < csv.size(); ++i)
        EXPECT_EQ(csv.validators()[i], json.validators()[i]);
}

TEST(Ingest, CsvDetails) {
    const auto s = ingest::parse_csv("id,stake\r\n\"x,y\",5\r\n\r\nz,7\r\n", "c");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.validators()[1].id, "x,y");
    EXPECT_EQ(code_of([] { ingest::parse_csv("name,amount\na,1\n"); }), Errc::parse_error);
    EXPECT_EQ(code_of([] { ingest::parse_csv("id,stake\na,1.5\n"); }), Errc::parse_error);
    EXPECT_EQ(code_of([] { ingest::parse_csv("id,stake\n"); }), Errc::empty_set);
    EXPECT_EQ(code_of([] { ingest::parse_csv("id,stake\na,1\na,2\n"); }), Errc::parse_error);
}

TEST(Ingest, ZeroStakeNamesValidator) {
    try {
        ingest::parse_json(R"({"chain":"t","validators":[{"id":"a","stake":"2"},{"id":"c","stake":"0"}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::zero_stake);
        EXPECT_NE(std::string(e.what()).find("'c'"), std::string::npos) << e.what();
    }
    EXPECT_EQ(code_of([] { ingest::parse_csv("id,stake\nc,-4\n"); }), Errc::zero_stake);
}

TEST(Ingest, JsonErrors) {
    EXPECT_EQ(code_of([] { ingest::parse_json("{"); }), Errc::parse_error);
    EXPECT_EQ(code_of([] { ingest::parse_json(R"({"validators":[]})"); }), Errc::empty_set);
    EXPECT_EQ(code_of([] { ingest::parse_json(R"({"validators":[{"id":"a","stake":1.5}]})"); }),
              Errc::parse_error);
    EXPECT_EQ(code_of([] { ingest::parse_json(R"({"validators":[{"id":"a","stake":"1e3"}]})"); }),
              Errc::parse_error);
    EXPECT_EQ(code_of([] {
                  ingest::parse_json(R"({"captured_at":"yesterday","validators":[{"id":"a","stake":"1"}]})");
              }),
              Errc::parse_error);
    // JSON integers are accepted as stakes.
    EXPECT_EQ(ingest::parse_json(R"({"validators":[{"id":"a","stake":12}]})").total_stake(),
              Stake{12});
}

TEST(Ingest, HugeStakesSurvive) {
    const std::string big = "123456789012345678901234567890123";
    const auto s = ingest::parse_json(R"({"chain":"x","validators":[{"id":"a","stake":")" + big + R"("}]})");
    EXPECT_EQ(format_stake(s.validators()[0].stake), big);
}

TEST(Ingest, RoundTripAndIdempotence) {
    for (const auto& c : destake::testing::corpus(50, 31, 1, 80)) {
        const auto snap = destake::testing::snapshot_of(c.stakes, "rt");
        const std::string once = ingest::to_json(snap);
        const auto again = ingest::parse_json(once);
        EXPECT_EQ(again, snap);
        EXPECT_EQ(ingest::to_json(again), once);
    }
    const auto s = ingest::parse_json(kToyJson);
    EXPECT_EQ(ingest::parse_json(ingest::to_json(s)), s);
}

TEST(Ingest, FilesAndFormatInference) {
    const auto json = temp_file("toy.json", kToyJson);
    const auto csv = temp_file("mychain.CSV", "id,stake\nb,1\na,3\n");
    EXPECT_EQ(ingest::infer_format(json), ingest::Format::json);
    EXPECT_EQ(ingest::infer_format(csv), ingest::Format::csv);
    EXPECT_FALSE(ingest::infer_format("x.txt"));

    const auto a = ingest::parse_snapshot(json);
    const auto b = ingest::parse_snapshot(csv);
    EXPECT_EQ(b.chain(), "mychain");
    EXPECT_EQ(std::vector(a.validators().begin(), a.validators().end()),
              std::vector(b.validators().begin(), b.validators().end()));

    const auto odd = temp_file("data.txt", "id,stake\nq,9\n");
    EXPECT_EQ(ingest::parse_snapshot(odd, ingest::Format::csv).size(), 1u);

    try {
        ingest::parse_snapshot("/nonexistent/missing.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::io_error);
        EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
    }
}

TEST(Ingest, SummaryExamples) {
    using S = ingest::SnapshotSummary;
    auto sum = [](std::vector<unsigned long long> v) {
        return ingest::summarize_snapshot(destake::testing::snapshot_of_ints(v));
    };
    EXPECT_EQ(sum({1, 2, 3, 4}), (S{4, 10, 1, 2, 4}));
    EXPECT_EQ(sum({7}), (S{1, 7, 7, 7, 7}));
    EXPECT_EQ(sum({5, 5, 5}), (S{3, 15, 5, 5, 5}));
}
