#pragma once

#include <iosfwd>

namespace dpp {

inline constexpr const char* kVersion = "1.0.0";

// Entry point of the dpp tool. Exit codes: 0 success, 1 domain or config
// error, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpp
