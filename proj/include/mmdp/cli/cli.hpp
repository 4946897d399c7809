#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmdp {

/// Process exit codes of the mmdp tool.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kIo = 3;
inline constexpr int kUsage = 64;
inline constexpr int kInternal = 70;
}  // namespace exit_code

/// Runs the command line `args` (without the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmdp
