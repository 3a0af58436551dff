#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epsearch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitValidation = 2;

// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epsearch::cli
