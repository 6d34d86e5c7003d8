#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfk::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitBadSpec = 2;
inline constexpr int kExitSizing = 3;

struct Console {
    std::ostream& out;
    std::ostream& err;
    bool color = false;
};

/// Runs one command line (args[0] is the program name) and returns its exit code.
int run(const std::vector<std::string>& args, Console console);

} // namespace mfk::cli
