#pragma once

#include <string>
#include <vector>

namespace ostop::cli {

/// Exit codes of the command driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDegeneracy = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitConfig = 4;

/// Full command-line entry point (argv without the program name):
///   solve|verify|oracle|sample --config <path> [--out <path>]
///   [--samples <path>] [--seed <u64>] [--window <lo> <hi>] [--quiet]
/// `verify` additionally takes the prior report as a positional argument.
/// Log verbosity comes from the OSTOP_LOG environment variable.
int run_main(const std::vector<std::string>& args);

} // namespace ostop::cli
