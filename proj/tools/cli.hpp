#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cadret::cli {

// Runs one CLI invocation; args exclude the program name. Returns the exit
// status: 0 on success, 2 on usage, contract, data or numeric errors, 3 on
// I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cadret::cli
