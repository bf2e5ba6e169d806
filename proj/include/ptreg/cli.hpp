#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace ptreg {

/// Runs one CLI invocation (argv without the program name). Exit codes:
/// 0 success, 1 usage error, 2 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ptreg
