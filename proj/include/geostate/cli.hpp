#pragma once

#include <string>
#include <vector>

namespace geostate {

// Full command-line front end. Returns the process exit code; failures
// print a one-line JSON error record to stderr. `args` excludes the
// program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace geostate
