#include "destake/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "destake/error.hpp"

namespace destake::ingest {
namespace {

using nlohmann::json;

bool valid_timestamp(const std::string& ts) {
    static const std::regex pattern(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z)");
    return std::regex_match(ts, pattern);
}

// A stake field is either a positive decimal integer or rejected. Sign and zero
// checks come first so the error names the validator.
Stake read_stake(std::string_view id, std::string_view text) {
    if (!text.empty() && text.front() == '-') {
        if (text.size() > 1 && std::all_of(text.begin() + 1, text.end(),
                                           [](char c) { return c >= '0' && c <= '9'; }))
            throw Error(Errc::zero_stake,
                        fmt::format("validator '{}' has non-positive stake {}", id, text));
        throw Error(Errc::parse_error,
                    fmt::format("validator '{}' has non-integer stake '{}'", id, text));
    }
    auto value = parse_stake(text);
    if (!value)
        throw Error(Errc::parse_error,
                    fmt::format("validator '{}' has non-integer stake '{}'", id, text));
    if (*value == 0)
        throw Error(Errc::zero_stake, fmt::format("validator '{}' has zero stake", id));
    return *value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && trim(current).empty()) {
            current.clear();
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? current : std::string(trim(current)));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted)
        throw Error(Errc::parse_error, fmt::format("line {}: unterminated quote", line_no));
    fields.push_back(was_quoted ? current : std::string(trim(current)));
    return fields;
}

} // namespace

std::optional<Format> infer_format(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".json")
        return Format::json;
    if (ext == ".csv")
        return Format::csv;
    return std::nullopt;
}

StakeSnapshot parse_json(std::string_view text, std::string default_chain) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse_error, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!doc.is_object())
        throw Error(Errc::parse_error, "snapshot JSON must be an object");

    std::string chain = std::move(default_chain);
    if (auto it = doc.find("chain"); it != doc.end()) {
        if (!it->is_string())
            throw Error(Errc::parse_error, "'chain' must be a string");
        chain = it->get<std::string>();
    }
    std::optional<std::string> captured_at;
    if (auto it = doc.find("captured_at"); it != doc.end() && !it->is_null()) {
        if (!it->is_string() || !valid_timestamp(it->get<std::string>()))
            throw Error(Errc::parse_error,
                        "'captured_at' must be an ISO-8601 UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)");
        captured_at = it->get<std::string>();
    }

    auto vit = doc.find("validators");
    if (vit == doc.end() || !vit->is_array())
        throw Error(Errc::parse_error, "'validators' must be an array");

    std::vector<ValidatorRecord> records;
    records.reserve(vit->size());
    for (std::size_t i = 0; i < vit->size(); ++i) {
        const json& v = (*vit)[i];
        if (!v.is_object())
            throw Error(Errc::parse_error, fmt::format("validators[{}] is not an object", i));
        auto id = v.find("id");
        auto stake = v.find("stake");
        if (id == v.end() || !id->is_string())
            throw Error(Errc::parse_error, fmt::format("validators[{}] lacks a string 'id'", i));
        if (stake == v.end())
            throw Error(Errc::parse_error, fmt::format("validators[{}] lacks 'stake'", i));
        ValidatorRecord rec;
        rec.id = id->get<std::string>();
        if (stake->is_string()) {
            rec.stake = read_stake(rec.id, stake->get_ref<const std::string&>());
        } else if (stake->is_number_unsigned()) {
            rec.stake = read_stake(rec.id, std::to_string(stake->get<std::uint64_t>()));
        } else if (stake->is_number_integer()) {
            rec.stake = read_stake(rec.id, std::to_string(stake->get<std::int64_t>()));
        } else {
            throw Error(Errc::parse_error,
                        fmt::format("validator '{}' has non-integer stake {}", rec.id, stake->dump()));
        }
        records.push_back(std::move(rec));
    }
    if (records.empty())
        throw Error(Errc::empty_set, "snapshot has no validators");
    return StakeSnapshot::create(std::move(chain), std::move(captured_at), std::move(records));
}

StakeSnapshot parse_csv(std::string_view text, std::string chain) {
    std::vector<ValidatorRecord> records;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (trim(line).empty())
            continue;

        auto fields = split_csv_line(line, line_no);
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "id" || fields[1] != "stake")
                throw Error(Errc::parse_error,
                            fmt::format("line {}: expected header 'id,stake'", line_no));
            header_seen = true;
            continue;
        }
        if (fields.size() != 2)
            throw Error(Errc::parse_error,
                        fmt::format("line {}: expected 2 fields, found {}", line_no, fields.size()));
        ValidatorRecord rec;
        rec.id = fields[0];
        rec.stake = read_stake(rec.id, fields[1]);
        records.push_back(std::move(rec));
    }
    if (!header_seen)
        throw Error(Errc::parse_error, "missing CSV header 'id,stake'");
    if (records.empty())
        throw Error(Errc::empty_set, "snapshot has no validators");
    return StakeSnapshot::create(std::move(chain), std::nullopt, std::move(records));
}

StakeSnapshot parse_snapshot(const std::filesystem::path& path, std::optional<Format> format) {
    if (!format)
        format = infer_format(path);
    if (!format)
        throw Error(Errc::parse_error,
                    fmt::format("{}: cannot infer format from extension (use .json or .csv)",
                                path.string()));

    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_error, fmt::format("{}: cannot open file", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    try {
        if (*format == Format::json)
            return parse_json(text, path.stem().string());
        return parse_csv(text, path.stem().string());
    } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string to_json(const StakeSnapshot& snapshot) {
    json doc;
    doc["chain"] = snapshot.chain();
    if (snapshot.captured_at())
        doc["captured_at"] = *snapshot.captured_at();
    json validators = json::array();
    for (const auto& v : snapshot.validators())
        validators.push_back({{"id", v.id}, {"stake", format_stake(v.stake)}});
    doc["validators"] = std::move(validators);
    return doc.dump(2) + "\n";
}

SnapshotSummary summarize_snapshot(const StakeSnapshot& snapshot) noexcept {
    const auto v = snapshot.validators();
    SnapshotSummary s;
    s.m = v.size();
    s.total = snapshot.total_stake();
    if (v.empty())
        return s;
    // Canonical order is descending, so ascending index k maps to m - 1 - k.
    s.max = v.front().stake;
    s.min = v.back().stake;
    s.median = v[v.size() - 1 - (v.size() - 1) / 2].stake;
    return s;
}

} // namespace destake::ingest
