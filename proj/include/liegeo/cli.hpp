#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liegeo {

/// Runs one command line (args exclude the program name) and returns the
/// exit status: 0 success, 1 domain or convergence failure, 2 input or
/// parse failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liegeo
