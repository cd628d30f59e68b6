#include "destake/stake.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "destake/error.hpp"
#include "destake/kernels.hpp"

namespace destake {

std::optional<Stake> parse_stake(std::string_view text) noexcept {
    if (text.empty())
        return std::nullopt;
    constexpr Stake max = ~Stake{0};
    Stake value = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            return std::nullopt;
        const auto digit = static_cast<unsigned>(c - '0');
        if (value > (max - digit) / 10)
            return std::nullopt;
        value = value * 10 + digit;
    }
    return value;
}

std::string format_stake(Stake value) {
    if (value == 0)
        return "0";
    std::string out;
    while (value != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

double to_double(Stake value) noexcept { return static_cast<double>(value); }

StakeSnapshot StakeSnapshot::create(std::string chain, std::optional<std::string> captured_at,
                                    std::vector<ValidatorRecord> validators) {
    if (validators.empty())
        throw Error(Errc::empty_set, "snapshot has no validators");

    std::unordered_set<std::string_view> seen;
    seen.reserve(validators.size());
    Stake total = 0;
    for (const auto& v : validators) {
        if (v.id.empty())
            throw Error(Errc::parse_error, "validator id must not be empty");
        if (!seen.insert(v.id).second)
            throw Error(Errc::parse_error, fmt::format("duplicate validator id '{}'", v.id));
        if (v.stake == 0)
            throw Error(Errc::zero_stake, fmt::format("validator '{}' has zero stake", v.id));
        if (total + v.stake < total)
            throw Error(Errc::parse_error, "total stake overflows 128 bits");
        total += v.stake;
    }

    std::sort(validators.begin(), validators.end(),
              [](const ValidatorRecord& a, const ValidatorRecord& b) {
                  if (a.stake != b.stake)
                      return a.stake > b.stake;
                  return a.id < b.id;
              });

    StakeSnapshot s;
    s.chain_ = std::move(chain);
    s.captured_at_ = std::move(captured_at);
    s.validators_ = std::move(validators);
    s.total_ = total;
    return s;
}

std::optional<Rational> parse_rational(std::string_view text) noexcept {
    if (text.empty())
        return std::nullopt;
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    auto digits = [](std::string_view s, std::uint64_t& out) {
        if (s.empty() || s.size() > 9)
            return false;
        out = 0;
        for (char c : s) {
            if (c < '0' || c > '9')
                return false;
            out = out * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return true;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        if (!digits(text.substr(0, slash), num) || !digits(text.substr(slash + 1), den))
            return std::nullopt;
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        std::uint64_t w = 0;
        std::uint64_t f = 0;
        if (!whole.empty() && !digits(whole, w))
            return std::nullopt;
        if (!digits(frac, f))
            return std::nullopt;
        den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        num = w * den + f;
    } else if (!digits(text, num)) {
        return std::nullopt;
    }
    if (den == 0)
        return std::nullopt;
    const std::uint64_t g = std::gcd(num, den);
    if (g != 0) {
        num /= g;
        den /= g;
    }
    if (num > 0xffffffffULL || den > 0xffffffffULL)
        return std::nullopt;
    return Rational{static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
}

std::string format_rational(Rational r) { return fmt::format("{}/{}", r.num, r.den); }

WeightScheme WeightScheme::power(Rational exponent) {
    if (exponent.den == 0 || exponent.num == 0 || exponent.num > exponent.den)
        throw Error(Errc::invalid_argument,
                    fmt::format("power exponent must lie in (0, 1], got {}",
                                format_rational(exponent)));
    const std::uint32_t g = std::gcd(exponent.num, exponent.den);
    return WeightScheme(SchemeKind::power, {exponent.num / g, exponent.den / g}, true);
}

WeightScheme WeightScheme::canonical() const noexcept {
    if (kind_ == SchemeKind::power) {
        if (exponent_ == Rational{1, 1})
            return linear();
        if (exponent_ == Rational{1, 2})
            return srsw();
    }
    if (kind_ != SchemeKind::lsw)
        return WeightScheme(kind_, kind_ == SchemeKind::power ? exponent_ : Rational{}, true);
    return *this;
}

std::string WeightScheme::label() const {
    switch (kind_) {
    case SchemeKind::linear: return "linear";
    case SchemeKind::srsw: return "srsw";
    case SchemeKind::lsw: return lsw_offset_ ? "lsw" : "lsw-raw";
    case SchemeKind::power: return fmt::format("power({})", format_rational(exponent_));
    }
    return "unknown";
}

double WeightScheme::weight_of(double stake) const noexcept {
    switch (kind_) {
    case SchemeKind::linear: return stake;
    case SchemeKind::srsw: return std::sqrt(stake);
    case SchemeKind::lsw: return lsw_offset_ ? std::log1p(stake) : std::log(stake);
    case SchemeKind::power:
        if (exponent_ == Rational{1, 1})
            return stake;
        if (exponent_ == Rational{1, 2})
            return std::sqrt(stake);
        return std::pow(stake, exponent_.value());
    }
    return stake;
}

bool WeightScheme::is_concave() const noexcept {
    return canonical().kind() != SchemeKind::linear;
}

WeightScheme parse_scheme(std::string_view name, std::optional<Rational> exponent,
                          bool lsw_offset) {
    if (name == "linear")
        return WeightScheme::linear();
    if (name == "srsw")
        return WeightScheme::srsw();
    if (name == "lsw")
        return WeightScheme::lsw(lsw_offset);
    if (name == "power") {
        if (!exponent)
            throw Error(Errc::invalid_argument, "scheme 'power' requires an exponent");
        return WeightScheme::power(*exponent);
    }
    throw Error(Errc::invalid_argument, fmt::format("unknown weight scheme '{}'", name));
}

WeightVector::WeightVector(std::vector<double> weights, WeightScheme scheme)
    : weights_(std::move(weights)), scheme_(scheme.canonical()) {
    if (weights_.empty())
        throw Error(Errc::empty_set, "weight vector is empty");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!(w > 0.0) || !std::isfinite(w))
            throw Error(Errc::non_positive_weight,
                        fmt::format("weight at position {} is not positive ({})", i, w));
    }
    total_ = kernels::sum(weights_);
}

WeightVector compute_weights(const StakeSnapshot& snapshot, const WeightScheme& scheme) {
    const auto validators = snapshot.validators();
    if (validators.empty())
        throw Error(Errc::empty_set, "snapshot has no validators");

    const WeightScheme canon = scheme.canonical();
    std::vector<double> stakes(validators.size());
    for (std::size_t i = 0; i < validators.size(); ++i)
        stakes[i] = to_double(validators[i].stake);

    if (canon.kind() == SchemeKind::lsw && !canon.lsw_offset()) {
        for (const auto& v : validators) {
            if (v.stake < 2)
                throw Error(Errc::non_positive_weight,
                            fmt::format("ln(stake) is not positive for validator '{}' (stake {})",
                                        v.id, format_stake(v.stake)));
        }
    }

    std::vector<double> weights(stakes.size());
    switch (canon.kind()) {
    case SchemeKind::linear:
        weights = std::move(stakes);
        break;
    case SchemeKind::srsw:
        kernels::sqrt(stakes, weights);
        break;
    case SchemeKind::lsw:
    case SchemeKind::power:
        std::transform(stakes.begin(), stakes.end(), weights.begin(),
                       [&](double s) { return canon.weight_of(s); });
        break;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw Error(Errc::non_positive_weight,
                        fmt::format("weight of validator '{}' is not positive", validators[i].id));
    }
    return WeightVector(std::move(weights), canon);
}

double quorum_threshold(const WeightVector& wv) noexcept { return 2.0 * wv.total() / 3.0; }

} // namespace destake
