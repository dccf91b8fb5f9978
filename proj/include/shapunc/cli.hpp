#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace shapunc {

/// "start:stop:step", both endpoints inclusive within 1e-9 of a step.
/// Every value must lie in (0, 1]. Throws ValidationError otherwise.
std::vector<double> parse_grid(std::string_view text);

/// Runs a command line (args[0] is the program name). Returns the process
/// exit code: 0 on success, 1 on any validation or I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shapunc
