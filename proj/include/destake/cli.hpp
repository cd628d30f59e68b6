#pragma once

#include <iosfwd>

namespace destake::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `destake` tool with injectable streams for testing.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace destake::cli
