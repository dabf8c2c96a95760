#include <iostream>
#include <string>
#include <vector>

#include "gsdmm/cli.hpp"

int main(int argc, char** argv) {
    gsdmm::cli::configure_logging_from_env();
    std::vector<std::string> args(argv, argv + argc);
    return gsdmm::cli::run(args, std::cout, std::cerr);
}
