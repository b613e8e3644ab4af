// Command-line front end. Parses arguments, loads theory and knowledge files,
// dispatches to one subcommand, and reports as text or JSON.
#pragma once

#include <iosfwd>

namespace acid {

// Exit codes: 0 decided / completed (deducible, provable, checks passed);
// 1 negative decision (not deducible, unprovable, violations, mismatches);
// 2 input or usage error; 3 a work budget was exceeded before a decision.
inline constexpr int kExitYes = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitBudget = 3;

// Runs one invocation: argv[0] is the program name, the first argument the
// subcommand (normalize, saturate, match, deduce, edp, prove, verify, slde,
// fuzz). Reports go to out, errors to err; returns the process exit code and
// never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace acid
