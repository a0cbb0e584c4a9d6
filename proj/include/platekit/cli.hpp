#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace platekit {

// Command-line driver. `args` excludes the program name; output streams are
// injectable for in-process testing. Returns the process exit status:
// 0 success, 1 numerical failure, 2 usage error.
int cli_main(std::vector<std::string> args, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace platekit
