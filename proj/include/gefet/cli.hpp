#pragma once

#include <string>
#include <vector>

namespace gefet {

// Full command-line entry point. Returns 0 on success, 1 on a usage or
// configuration error, 2 on a runtime failure.
int cli_main(int argc, const char* const* argv);

// Convenience wrapper; args[0] is the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace gefet
