#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wfp::cli {

/// Runs one command. `args` excludes the program name. Returns the exit code:
/// 0 success, 1 violations or refuted steps, 2 usage, parse or load errors.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wfp::cli
