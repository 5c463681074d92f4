#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pavelka::cli {

// Exit status: 0 success or verdict true, 1 verdict false, 2 input error.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pavelka::cli
