#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fatoulab::cli {

/// Runs one subcommand. args excludes the program name. Prints one JSON
/// summary line to out; human-readable errors go to err.
/// Exit codes: 0 ok, 1 input or parse error, 2 search gave no answer
/// (NotConverged, NotFound, NoConvergence, ConvergenceNotObserved).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// Subcommand names in help order.
const std::vector<std::string>& commands();

}  // namespace fatoulab::cli
