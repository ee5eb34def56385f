#pragma once

#include "docape/error.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace docape {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitBackend = 2;

/// Exit code for a failure of the given code: 1 for validation, 2 for backend / IO.
int exit_code_for(ErrorCode code);

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace docape
