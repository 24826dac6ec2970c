#pragma once

#include <ostream>

namespace sarena::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

// Entry point for `sarena features|fit|simulate|serve|report`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sarena::cli
