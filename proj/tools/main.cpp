#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    const bool color = std::getenv("MFK_NO_COLOR") == nullptr && isatty(STDERR_FILENO);
    return mfk::cli::run(args, {std::cout, std::cerr, color});
}
