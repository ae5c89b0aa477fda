#pragma once

#include <iosfwd>

namespace susyband {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Entry point of the susyband command line: subcommands bands, transform, invariance and states.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace susyband
