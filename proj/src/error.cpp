#include "destake/error.hpp"

namespace destake {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::empty_set: return "EmptySet";
    case Errc::parse_error: return "ParseError";
    case Errc::zero_stake: return "ZeroStake";
    case Errc::non_positive_weight: return "NonPositiveWeight";
    case Errc::insufficient_points: return "InsufficientPoints";
    case Errc::too_large: return "TooLarge";
    case Errc::insufficient_samples: return "InsufficientSamples";
    case Errc::invalid_split: return "InvalidSplit";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    }
    return "Unknown";
}

} // namespace destake
