// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cidcassi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `cidcassi` tool. Returns 0 on success, 1 on a usage
/// error (usage text goes to stderr) and 2 when the inputs are unusable.
int cli_main(int argc, char** argv);

/// Same, with explicit arguments (args[0] is the program name) and streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cidcassi
