#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ewb::cli {

// Runs one `ewb` invocation. args excludes the program name. Errors are
// written to err as a single JSON object; the return value is the exit code
// (0 success, 1 pipeline error, 2 usage error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_main(int argc, char** argv);

}  // namespace ewb::cli
