#pragma once

#include "dualvol/volume.hpp"

#include <iosfwd>
#include <string>

namespace dualvol {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// "none", "E:delta:a:b", "rps:kappa" or "extremal:delta".
Region ParseRegion(const std::string& spec);

// "a,b;c,d" row-major, rows separated by ';'.
Matrix ParseMatrix(const std::string& spec);

// Runs one command line (argv[0] is the program name). Normal output goes to
// `out`, diagnostics to `err`; returns the exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dualvol
