#pragma once

#include <string>
#include <vector>

namespace pkns {

//============================================================
// Command line front end. Exit codes: 0 success, 2 configuration or
// usage errors, 3 numerical failures, format defects and failed
// checks, 4 suspected blow-up.
//============================================================

int cli_main(int argc, const char* const* argv);

// Same entry point for in-process tests; args exclude the program name.
int cli_main(const std::vector<std::string>& args);

} // namespace pkns
