#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsdmm::cli {

// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kBadInput = 2,
    kBadConfig = 3,
    kUnmatchedIds = 4,
    kMissingModel = 5,
};

// Entry point shared by the executable and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Applies DMM_LOG (trace|debug|info|warn|error|off) to the global logger.
void configure_logging_from_env();

}  // namespace gsdmm::cli
