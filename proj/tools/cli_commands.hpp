#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prefel::cli {

// Runs the prefel command line. Returns the process exit code: 0 on
// success, 2 on validation errors, 1 on other failures.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// "0.1,0.2" or "0.001,0.2,...,1" (the step comes from the two values
// before the ellipsis).
std::vector<double> parse_list(const std::string& text);

}  // namespace prefel::cli
