#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace destake {

enum class Errc {
    empty_set,
    parse_error,
    zero_stake,
    non_positive_weight,
    insufficient_points,
    too_large,
    insufficient_samples,
    invalid_split,
    invalid_argument,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace destake
