#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "destake/stake.hpp"

namespace destake::ingest {

enum class Format { json, csv };

/// Format implied by the file extension (".json" / ".csv", case-insensitive).
std::optional<Format> infer_format(const std::filesystem::path& path);

/// Canonical JSON:
///   {"chain": "...", "captured_at": "2024-10-25T00:00:00Z",
///    "validators": [{"id": "...", "stake": "123"}, ...]}
/// `stake` is a decimal string (JSON integers are accepted as well).
/// `default_chain` is used when the document has no "chain" field.
StakeSnapshot parse_json(std::string_view text, std::string default_chain = {});

/// CSV with header `id,stake`, one validator per line. Ids may be double-quoted.
StakeSnapshot parse_csv(std::string_view text, std::string chain = {});

/// Reads and parses a snapshot file. The chain label for CSV input, and for JSON
/// input without one, is the file stem. Throws Error(io_error) when unreadable.
StakeSnapshot parse_snapshot(const std::filesystem::path& path,
                             std::optional<Format> format = std::nullopt);

/// Canonical JSON form of a snapshot (validators in canonical order).
std::string to_json(const StakeSnapshot& snapshot);

struct SnapshotSummary {
    std::size_t m = 0;
    Stake total = 0;
    Stake min = 0;
    Stake median = 0; // lower-middle element for even m
    Stake max = 0;

    friend bool operator==(const SnapshotSummary&, const SnapshotSummary&) = default;
};

SnapshotSummary summarize_snapshot(const StakeSnapshot& snapshot) noexcept;

} // namespace destake::ingest
