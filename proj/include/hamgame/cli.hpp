#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hamgame/io.hpp"

namespace hamgame::cli {

enum ExitCode { kOk = 0, kUsage = 1, kBlowUp = 2 };

/// One-line class summary, e.g. "zero-sum, bipartite" or
/// "constant-sum, normalized to zero-sum (c=2)".
std::string describe_classification(const LoadedGame& loaded);

/// Entry point shared by tools/hamgame and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hamgame::cli
