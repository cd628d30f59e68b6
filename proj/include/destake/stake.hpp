#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace destake {

/// Stake in the chain's base token units. 128 bits because per-validator
/// amounts on some chains already exceed 2^64.
__extension__ typedef unsigned __int128 Stake;

/// Parses a decimal integer literal (digits only, no sign). Returns nullopt on
/// any other character, an empty string, or overflow.
std::optional<Stake> parse_stake(std::string_view text) noexcept;
std::string format_stake(Stake value);
double to_double(Stake value) noexcept;

struct ValidatorRecord {
    std::string id;
    Stake stake = 0;

    friend bool operator==(const ValidatorRecord&, const ValidatorRecord&) = default;
};

/// One chain's validator set at one point in time.
///
/// Construction validates and normalizes: at least one validator, non-empty
/// unique ids, every stake > 0, and the validators ordered by descending stake
/// with ties broken by ascending id.
class StakeSnapshot {
public:
    static StakeSnapshot create(std::string chain, std::optional<std::string> captured_at,
                                std::vector<ValidatorRecord> validators);

    const std::string& chain() const noexcept { return chain_; }
    const std::optional<std::string>& captured_at() const noexcept { return captured_at_; }
    std::span<const ValidatorRecord> validators() const noexcept { return validators_; }
    std::size_t size() const noexcept { return validators_.size(); }
    Stake total_stake() const noexcept { return total_; }

    friend bool operator==(const StakeSnapshot&, const StakeSnapshot&) = default;

private:
    StakeSnapshot() = default;

    std::string chain_;
    std::optional<std::string> captured_at_;
    std::vector<ValidatorRecord> validators_;
    Stake total_ = 0;
};

/// Exponent of a power-law weight, kept exact so that 1/1 and 1/2 can be
/// recognized as the linear and square-root schemes.
struct Rational {
    std::uint32_t num = 1;
    std::uint32_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Accepts "p/q" or a plain decimal such as "0.5"; the result is reduced.
std::optional<Rational> parse_rational(std::string_view text) noexcept;
std::string format_rational(Rational r);

enum class SchemeKind { linear, srsw, lsw, power };

class WeightScheme {
public:
    static WeightScheme linear() noexcept { return WeightScheme(SchemeKind::linear, {}, true); }
    static WeightScheme srsw() noexcept { return WeightScheme(SchemeKind::srsw, {}, true); }
    /// `offset` selects ln(1 + s); without it the weight is ln(s).
    static WeightScheme lsw(bool offset = true) noexcept {
        return WeightScheme(SchemeKind::lsw, {}, offset);
    }
    /// Throws Error(invalid_argument) unless 0 < exponent <= 1.
    static WeightScheme power(Rational exponent);

    SchemeKind kind() const noexcept { return kind_; }
    Rational exponent() const noexcept { return exponent_; }
    bool lsw_offset() const noexcept { return lsw_offset_; }

    /// power(1) -> linear, power(1/2) -> srsw; everything else unchanged.
    WeightScheme canonical() const noexcept;

    /// Short stable label: "linear", "srsw", "lsw", "lsw-raw", "power(1/3)".
    std::string label() const;

    /// Weight of a single stake under this scheme (no positivity check).
    double weight_of(double stake) const noexcept;

    /// True when the weight function is strictly concave (splitting can pay).
    bool is_concave() const noexcept;

    friend bool operator==(const WeightScheme&, const WeightScheme&) = default;

private:
    WeightScheme(SchemeKind kind, Rational exponent, bool offset) noexcept
        : kind_(kind), exponent_(exponent), lsw_offset_(offset) {}

    SchemeKind kind_;
    Rational exponent_;
    bool lsw_offset_;
};

/// Parses "linear", "srsw", "lsw" or "power"; power needs `exponent`.
WeightScheme parse_scheme(std::string_view name, std::optional<Rational> exponent = {},
                          bool lsw_offset = true);

/// Per-validator consensus weights, aligned with the snapshot order.
class WeightVector {
public:
    /// Throws EmptySet for no weights and NonPositiveWeight for any entry that is
    /// not a finite positive number.
    WeightVector(std::vector<double> weights, WeightScheme scheme);

    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](std::size_t i) const noexcept { return weights_[i]; }
    std::size_t size() const noexcept { return weights_.size(); }
    double total() const noexcept { return total_; }
    const WeightScheme& scheme() const noexcept { return scheme_; }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<double> weights_;
    double total_ = 0.0;
    WeightScheme scheme_;
};

WeightVector compute_weights(const StakeSnapshot& snapshot, const WeightScheme& scheme);

/// Minimum cumulative weight of a quorum certificate: (2/3) W.
double quorum_threshold(const WeightVector& wv) noexcept;

} // namespace destake
