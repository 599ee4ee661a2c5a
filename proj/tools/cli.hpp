#pragma once

#include <iosfwd>

namespace semsar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `semsar` tool; `out` receives results, `err` messages.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace semsar::cli
