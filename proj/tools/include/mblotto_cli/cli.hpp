#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mblotto::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kNumeric = 3 };

// Parses and runs one command line. JSON goes to `out` when no --out path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Grid syntax: comma list ("0.1,0.2,inf"), "logspace:lo:hi:n" (powers of ten) or "linspace:lo:hi:n".
std::vector<double> parse_grid(const std::string& text);

} // namespace mblotto::cli
