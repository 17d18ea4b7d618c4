#pragma once

#include <string>
#include <vector>

namespace cm::cli {

// Parses argv, dispatches to the subcommand and returns the exit code:
// 0 success, 1 a compare threshold failed, 2 bad usage or runtime error.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

// Comma-separated reals, scientific notation accepted.
std::vector<double> parse_grid(const std::string& text);

}  // namespace cm::cli
