#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailrobust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitSolver = 2;

// Runs one command line (without the program name). Artifacts go to --out
// when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailrobust::cli
