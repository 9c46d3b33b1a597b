#pragma once

#include <iosfwd>

namespace bmdlimits::cli {

// Exit codes: 0 success, 1 domain or infeasibility error, 2 usage or I/O
// error. `repro` returns 1 when a required manifest row fails.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bmdlimits::cli
